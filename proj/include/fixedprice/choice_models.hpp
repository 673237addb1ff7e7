#pragma once

#include <array>
#include <vector>

#include "fixedprice/core_model.hpp"

namespace fixedprice {

inline constexpr int kMaxGeneratedItems = 8;

struct MnlParams {
  std::vector<Rational> weights;  // one positive weight per item
  Rational no_purchase_weight = 1;
};

// Urn model: draw items without replacement in proportion to weight until
// the no-purchase ball is drawn.
ListDistribution gen_mnl(const MnlParams& params);

struct MarkovChainParams {
  std::vector<Rational> arrival;                  // start probability per item
  Rational arrival_none = 0;                      // start directly at no-purchase
  std::vector<std::vector<Rational>> transition;  // item -> item
  std::vector<Rational> exit;                     // item -> no-purchase
};

// Lists are the orders in which items are first visited before absorption.
ListDistribution gen_markov_chain(const MarkovChainParams& params);

struct EliminationByAspectsParams {
  std::vector<Rational> weights;
  Rational no_purchase_weight = 1;
  std::vector<std::vector<Item>> nests;  // partition of the items
};

// Once an item of a nest is drawn the rest of that nest is drawn next, in
// proportion to weight, before any other ball.
ListDistribution gen_elimination_by_aspects(const EliminationByAspectsParams& params);

// With probability alpha[j] the list is (j); otherwise drawn from dist.
ListDistribution mix_with_singletons(const ListDistribution& dist, const std::vector<Rational>& alpha);

struct NestedLogitParams {
  std::vector<Real> weights;
  Real no_purchase_weight = 1;
  std::vector<std::vector<Item>> nests;
  std::vector<Real> dissimilarity;  // one per nest, in (0,1]
};

NestedLogitParams single_nest_params(std::vector<Real> weights, Real no_purchase_weight, Real dissimilarity);

// Closed-form nested logit choice probability of j from assortment S.
Real nested_logit_choice_prob(const NestedLogitParams& params, ItemSet assortment, Item j);

// Three items in one nest; transition probabilities are fitted to the closed
// form, with tied depth-three transitions. Throws InvalidInput when some
// fitted probability leaves [0,1].
ListDistribution gen_nested_logit_3item(const std::array<Real, 3>& weights, const Real& no_purchase_weight,
                                        const Real& dissimilarity);

// Symmetric transition probabilities q_1..q_n for n identical items in one
// nest with no-purchase weight 1.
std::vector<Real> nested_logit_symmetric_transitions(int n, const Real& weight, const Real& dissimilarity);

// Up to four identical items in one nest, no-purchase weight 1.
ListDistribution gen_nested_logit_4item_symmetric(const Real& weight, const Real& dissimilarity, int n = 4);

// Closed-form gap between the best symmetric three-item Markov chain fit and
// the nested logit probability of buying from a single-item assortment.
Real nl_markov_fit_gap(const Real& weight, const Real& dissimilarity);

// Exact conversion of float-born list probabilities, renormalized to sum to 1.
ListDistribution distribution_from_reals(int item_count,
                                         const std::vector<std::pair<RankedList, Real>>& lists);

}  // namespace fixedprice
