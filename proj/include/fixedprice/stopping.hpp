#pragma once

#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "fixedprice/choice_models.hpp"
#include "fixedprice/core_model.hpp"
#include "fixedprice/tree_diagram.hpp"

namespace fixedprice {

// Stop-or-continue decision on reaching an item with a given history.
using StoppingRule = std::function<bool(Item item, ItemSet history)>;

// Per item, an upward-closed family of histories on which the seller stops,
// stored by its minimal sets.
class MonotoneStoppingPolicy {
 public:
  explicit MonotoneStoppingPolicy(int item_count = 0);
  static MonotoneStoppingPolicy from_minimal_sets(int item_count, std::vector<std::vector<ItemSet>> minimal);
  // Stop on every item of S regardless of history, nowhere else.
  static MonotoneStoppingPolicy from_assortment(int item_count, ItemSet assortment);

  int item_count() const { return item_count_; }
  bool stops(Item item, ItemSet history) const;
  const std::vector<ItemSet>& minimal_sets(Item item) const { return minimal_.at(static_cast<std::size_t>(item)); }
  StoppingRule rule() const;

 private:
  int item_count_;
  std::vector<std::vector<ItemSet>> minimal_;
};

// Expected revenue of selling the first item (endpoint) where the rule stops.
Rational stopping_rule_revenue(const Instance& inst, const StoppingRule& rule);
Rational policy_revenue(const Instance& inst, const MonotoneStoppingPolicy& policy);

struct PolicyOptimum {
  MonotoneStoppingPolicy policy;
  Rational value;
};

inline constexpr int kDefaultPolicyCap = 4;

// Enumerates every monotone policy. Ties go to fewer stopping entries, then
// to the lexicographically smallest truth tables.
PolicyOptimum optimal_policy_bruteforce(const Instance& inst, int cap = kDefaultPolicyCap);

struct MarkovStoppingResult {
  ItemSet stop_set;
  std::vector<Rational> values;  // optimal value of arriving at each item
  Rational revenue;              // sum of arrival probability times value
};

// Optimal stopping on the chain itself, where revisits are allowed, solved
// by policy iteration. Items with positive price whose price is at least the
// continuation value form the stop set.
MarkovStoppingResult markov_stopping_assortment(const MarkovChainParams& chain, const std::vector<Rational>& prices);

// Pr[j first among S | list starts with the prefix], memoized per prefix.
class FutureChoices {
 public:
  explicit FutureChoices(const ListDistribution& dist);

  const TreeDiagram& tree() const { return tree_; }
  // S must avoid the prefix of `node`.
  const Rational& prob(int node, ItemSet assortment, Item j);

 private:
  const std::vector<Rational>& table(int node);

  TreeDiagram tree_;
  std::unordered_map<int, std::vector<Rational>> tables_;
};

// Price of the prefix's endpoint minus the revenue S would still collect
// from this point on.
Rational s_adjusted_price(const Instance& inst, ItemSet assortment, const Prefix& rho);

struct AdjustedRevenueCheck {
  Rational revenue_gap;       // revenue of the rule minus revenue of S
  Rational adjusted_revenue;  // adjusted prices weighted by stopping probability
};

// Verifies that the revenue gain of a rule over S equals the expected
// S-adjusted price at the stopping point. The rule must stop on every item
// of S. Throws InternalInconsistency when the two sides differ.
AdjustedRevenueCheck adjusted_revenue_identity(const Instance& inst, ItemSet assortment, const StoppingRule& rule);

struct DominationResult {
  bool holds = true;
  std::optional<ItemSet> assortment;  // first failing (S, j)
  std::optional<Item> item;
};

// Does the future from rho dominate the future from rho_prime: for every S
// avoiding both prefixes and every j in S, Pr[j | rho] >= Pr[j | rho']?
// With a tolerance t the test becomes Pr[j | rho] >= Pr[j | rho'] - t.
DominationResult check_domination(const ListDistribution& dist, const Prefix& rho, const Prefix& rho_prime,
                                  const std::optional<Rational>& tolerance = std::nullopt);

struct HistoryMonotoneWitness {
  Prefix rho;
  Prefix rho_prime;
  ItemSet assortment;
  Item item;
};

struct HistoryMonotoneResult {
  bool holds = true;
  std::optional<HistoryMonotoneWitness> witness;
};

// Every pair of realizable prefixes with the same endpoint whose bodies
// satisfy body(rho) not within body(rho') must have rho dominating rho'.
// Reports the first failure in (length, items) order of rho, then rho'.
HistoryMonotoneResult check_history_monotone(const ListDistribution& dist,
                                             const std::optional<Rational>& tolerance = std::nullopt);

inline Rational default_tolerance() { return Rational(1, 1000000000); }

enum class TierKind {
  Incomparable,  // a connected group of mutually incomparable prefixes with equal futures
  SameSet,       // prefixes that are equal as sets
};

struct Tier {
  TierKind kind;
  std::vector<Prefix> prefixes;
};

// Groups the realizable prefixes ending at j and avoiding S into tiers
// ordered by set containment. Requires history-monotone futures; checks the
// tier properties and the resulting order of S-adjusted prices.
std::vector<Tier> tier_decomposition(const Instance& inst, ItemSet assortment, Item j,
                                     const std::optional<Rational>& tolerance = std::nullopt);

}  // namespace fixedprice
