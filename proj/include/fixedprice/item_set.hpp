#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace fixedprice {

// Items are indices into the instance's ordered item list.
using Item = int;

inline constexpr int kMaxItems = 32;

// Set of items stored as a bitmask; bit i stands for item i.
class ItemSet {
 public:
  constexpr ItemSet() = default;
  constexpr explicit ItemSet(std::uint32_t mask) : bits_(mask) {}
  ItemSet(std::initializer_list<Item> items) {
    for (Item i : items) insert(i);
  }

  static constexpr ItemSet full(int n) {
    return ItemSet(n >= 32 ? ~std::uint32_t{0} : ((std::uint32_t{1} << n) - 1));
  }
  template <class Range>
  static ItemSet of(const Range& items) {
    ItemSet s;
    for (Item i : items) s.insert(i);
    return s;
  }

  constexpr std::uint32_t mask() const { return bits_; }
  constexpr bool contains(Item i) const { return (bits_ >> i) & 1U; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }

  constexpr void insert(Item i) { bits_ |= std::uint32_t{1} << i; }
  constexpr void erase(Item i) { bits_ &= ~(std::uint32_t{1} << i); }
  constexpr ItemSet with(Item i) const { return ItemSet(bits_ | (std::uint32_t{1} << i)); }
  constexpr ItemSet without(Item i) const { return ItemSet(bits_ & ~(std::uint32_t{1} << i)); }

  constexpr bool subset_of(ItemSet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr bool intersects(ItemSet other) const { return (bits_ & other.bits_) != 0; }

  constexpr ItemSet operator|(ItemSet o) const { return ItemSet(bits_ | o.bits_); }
  constexpr ItemSet operator&(ItemSet o) const { return ItemSet(bits_ & o.bits_); }
  constexpr ItemSet operator-(ItemSet o) const { return ItemSet(bits_ & ~o.bits_); }

  constexpr bool operator==(const ItemSet&) const = default;

  std::vector<Item> items() const {
    std::vector<Item> out;
    for (std::uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

 private:
  std::uint32_t bits_ = 0;
};

// Lexicographic order on the sorted item sequences, so {A,B} < {A,B,C} < {B}.
inline bool lex_less(ItemSet a, ItemSet b) {
  auto x = a.items();
  auto y = b.items();
  return x < y;
}

}  // namespace fixedprice
