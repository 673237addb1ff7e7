#pragma once

#include <optional>
#include <vector>

#include "fixedprice/mechanism.hpp"

namespace fixedprice {

// f(S) = min(sum of weights over S, budget).
struct BudgetAdditiveParams {
  std::vector<Rational> weights;
  Rational budget = 1;
};

Rational budget_additive_value(const BudgetAdditiveParams& params, ItemSet s);
Mechanism budget_additive_mechanism(const Instance& inst, const BudgetAdditiveParams& params);

struct TopKLottery {
  int k = 1;
  ItemSet support;
  Rational value;
};

// Weight 1/k on each item of the support, budget 1: the buyer gets each of
// the first k supported items on their list with probability 1/k.
BudgetAdditiveParams topk_params(int item_count, int k, ItemSet support);

// Best top-k lottery over supports (and over k when unset). Ties go to the
// smaller k, then to the lexicographically smallest support.
TopKLottery best_topk_lottery(const Instance& inst, std::optional<int> k = std::nullopt,
                              int cap = kDefaultAssortmentCap);

// Expected revenue when each item is offered independently with the given
// inclusion probability.
double independent_assortment_revenue(const Instance& inst, const std::vector<double>& inclusion);

struct RoundingReport {
  std::vector<double> inclusion;
  double rounded_revenue = 0;
  double guarantee = 0;  // the bound the rounded revenue must reach
};

inline constexpr double kRoundingSlack = 1e-9;

// Includes item j independently with probability 1 - exp(-w_j). Throws
// InternalInconsistency if the result falls below (1/e) of the lottery revenue.
RoundingReport round_budget_additive(const Instance& inst, const BudgetAdditiveParams& params);

// Inclusion 2a/L for items with max allocation a <= 1/2 and 1/L above,
// where L is the longest supported list. Throws InternalInconsistency if the
// result falls below 2/(eL) of the mechanism revenue.
RoundingReport round_bounded_length(const Instance& inst, const Mechanism& m);

// Items 1..n priced M^j; the most expensive item on a list is j with
// probability M^-j, preceded by one uniformly chosen cheaper item when j > 1.
Instance gen_topk_gap_instance(int n, const Rational& base);

// {"weights":{"id":r},"budget":r}
BudgetAdditiveParams budget_params_from_json(const Instance& inst, const Json& doc);
Json budget_params_to_json(const Instance& inst, const BudgetAdditiveParams& params);

}  // namespace fixedprice
