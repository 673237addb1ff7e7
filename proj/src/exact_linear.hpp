#pragma once

#include <optional>
#include <vector>

#include "fixedprice/rational.hpp"

namespace fixedprice::detail {

using Matrix = std::vector<std::vector<Rational>>;

// Solves A X = B by Gauss-Jordan elimination; nullopt when A is singular.
inline std::optional<Matrix> solve_linear(Matrix a, Matrix b) {
  const std::size_t n = a.size();
  const std::size_t m = n == 0 ? 0 : b[0].size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    Rational inv = 1 / a[col][col];
    for (std::size_t k = col; k < n; ++k) a[col][k] *= inv;
    for (std::size_t k = 0; k < m; ++k) b[col][k] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      Rational f = a[r][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      for (std::size_t k = 0; k < m; ++k) b[r][k] -= f * b[col][k];
    }
  }
  return b;
}

}  // namespace fixedprice::detail
