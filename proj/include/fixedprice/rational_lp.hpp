#pragma once

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "fixedprice/rational.hpp"

namespace fixedprice {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct LpVariable {
  std::string name;
  std::optional<Rational> lower = Rational(0);  // nullopt means unbounded below
  std::optional<Rational> upper;                // nullopt means unbounded above
};

struct LpTerm {
  int var = 0;
  Rational coef;
};

struct LpRow {
  std::string name;
  std::vector<LpTerm> terms;
  Relation relation = Relation::LessEqual;
  Rational rhs;
  // Lazy rows are only brought into the simplex when the current optimum
  // violates them. The rest of the LP must be bounded on its own.
  bool lazy = false;
};

// Maximization LP over exact rationals.
class RationalLP {
 public:
  int add_variable(std::string name, std::optional<Rational> lower = Rational(0),
                   std::optional<Rational> upper = std::nullopt);
  // Merges repeated variables and drops zero terms. Returns false when an
  // identical row was already present and the new one was discarded.
  bool add_row(LpRow row);
  void set_objective(int var, Rational coef);
  void add_objective(int var, const Rational& coef);

  const std::vector<LpVariable>& variables() const { return variables_; }
  const std::vector<LpRow>& rows() const { return rows_; }
  const std::vector<Rational>& objective() const { return objective_; }
  int variable_count() const { return static_cast<int>(variables_.size()); }
  std::optional<int> find_variable(const std::string& name) const;

  Rational evaluate_objective(const std::vector<Rational>& values) const;
  // Names of rows and bounds violated by `values` (empty when feasible).
  std::vector<std::string> violations(const std::vector<Rational>& values) const;

 private:
  std::vector<LpVariable> variables_;
  std::vector<LpRow> rows_;
  std::vector<Rational> objective_;
  std::unordered_set<std::string> row_keys_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Rational value;
  std::vector<Rational> values;        // optimal basic solution, one per variable
  std::vector<Rational> row_duals;     // one per row; zero for rows never activated
  std::vector<Rational> upper_duals;   // one per variable upper bound
  int pivots = 0;
  int rounds = 0;                      // lazy-row generation rounds
};

// Dictionary simplex in exact arithmetic. Entering variables follow the
// largest coefficient rule and fall back to Bland's rule permanently after a
// run of degenerate pivots, so the method always terminates.
LpSolution solve_lp(const RationalLP& lp);

// Human-readable LP listing with exact rational coefficients.
std::string to_lp_format(const RationalLP& lp);

}  // namespace fixedprice
