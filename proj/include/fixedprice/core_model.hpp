#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fixedprice/item_set.hpp"
#include "fixedprice/rational.hpp"

namespace fixedprice {

// Items in preference order; the buyer never buys anything off the list.
using RankedList = std::vector<Item>;

// A prefix of some ranked list. The last element is its endpoint, the rest its body.
using Prefix = RankedList;

inline Item endpoint(const Prefix& rho) { return rho.back(); }
inline Prefix body(const Prefix& rho) { return Prefix(rho.begin(), rho.end() - 1); }
inline ItemSet to_set(const RankedList& list) { return ItemSet::of(list); }
bool starts_with(const RankedList& list, const Prefix& prefix);

struct ListEntry {
  RankedList list;
  Rational prob;
};

// Finite-support distribution over ranked lists of items 0..item_count-1.
struct ListDistribution {
  int item_count = 0;
  std::vector<ListEntry> entries;

  Rational total() const;
  std::optional<std::size_t> find(const RankedList& list) const;
  // Length of the longest list with positive probability.
  std::size_t max_length() const;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

// Reports every violation at once instead of stopping at the first.
ValidationReport validate_distribution(const ListDistribution& dist);

// Lists sorted by (length, items) so that equal distributions compare equal.
ListDistribution canonical(ListDistribution dist);

struct Instance {
  std::vector<std::string> item_ids;
  std::vector<Rational> prices;
  ListDistribution dist;

  int item_count() const { return static_cast<int>(item_ids.size()); }
  ItemSet all_items() const { return ItemSet::full(item_count()); }
  std::optional<Item> find_item(std::string_view id) const;
  Item item(std::string_view id) const;  // throws InvalidInput for unknown ids
  const Rational& price(Item i) const { return prices.at(static_cast<std::size_t>(i)); }
};

// Checks ids, prices and the distribution; throws InvalidInput on failure.
void validate_instance(const Instance& inst);

std::string format_list(const Instance& inst, const RankedList& list);
std::string format_set(const Instance& inst, ItemSet set);

// Probability that j is the first item of S on the list, conditioned on the
// list starting with `given` and evaluated over the remainder of the list.
Rational choice_probability(const ListDistribution& dist, ItemSet assortment, Item j,
                            const Prefix& given = {});
Rational choice_probability(const Instance& inst, ItemSet assortment, Item j,
                            const Prefix& given = {});

Rational assortment_revenue(const Instance& inst, ItemSet assortment);

struct AssortmentOptimum {
  ItemSet assortment;
  Rational value;
};

inline constexpr int kDefaultAssortmentCap = 20;

// Exhaustive search; ties go to the lexicographically smallest item set.
AssortmentOptimum optimal_assortment(const Instance& inst, int cap = kDefaultAssortmentCap);

}  // namespace fixedprice
