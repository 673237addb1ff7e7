#include <gtest/gtest.h>

#include <cmath>

#include "fixedprice/errors.hpp"
#include "fixedprice/lotteries.hpp"
#include "fixedprice/model_descriptor.hpp"
#include "fixtures.hpp"
#include "random_instances.hpp"

using namespace fixedprice;
using namespace fixedprice::testing;

namespace {

// A list receives each of its first k supported items with probability 1/k.
Rational topk_oracle(const Instance& inst, int k, ItemSet support) {
  Rational total = 0;
  for (const auto& e : inst.dist.entries) {
    int taken = 0;
    for (Item j : e.list) {
      if (taken == k) break;
      if (!support.contains(j)) continue;
      total += e.prob * inst.price(j) / k;
      ++taken;
    }
  }
  return total;
}

double independent_oracle(const Instance& inst, const std::vector<double>& inclusion) {
  double total = 0;
  const int n = inst.item_count();
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    double p = 1;
    for (int j = 0; j < n; ++j) p *= (mask >> j & 1U) ? inclusion[static_cast<std::size_t>(j)] : 1 - inclusion[static_cast<std::size_t>(j)];
    total += p * to_double(assortment_revenue(inst, ItemSet(mask)));
  }
  return total;
}

BudgetAdditiveParams random_params(Rng& rng, int n) {
  BudgetAdditiveParams p;
  for (int j = 0; j < n; ++j) p.weights.push_back(random_rational(rng, 4, 4));
  p.budget = random_rational(rng, 4, 4);
  if (p.budget > 1) p.budget = 1;
  return p;
}

}  // namespace

TEST(BudgetAdditive, LotteryGapHalfWeights) {
  Instance inst = load_fixture("lottery_gap.json");
  BudgetAdditiveParams params{std::vector<Rational>(4, Rational(1, 2)), Rational(1)};
  Mechanism m = budget_additive_mechanism(inst, params);
  EXPECT_EQ(mechanism_revenue(inst, m), Rational(5, 4));
  EXPECT_TRUE(verify_ic(inst, m).ok());
  for (const auto& row : m.alloc) {
    for (const auto& x : row) EXPECT_EQ(x, Rational(1, 2));
  }
}

TEST(BudgetAdditive, RejectsBadParameters) {
  Instance inst = load_fixture("lottery_gap.json");
  EXPECT_THROW(budget_additive_mechanism(inst, {{Rational(1)}, Rational(1)}), InvalidInput);
  EXPECT_THROW(budget_additive_mechanism(inst, {std::vector<Rational>(4, Rational(-1)), Rational(1)}), InvalidInput);
  EXPECT_THROW(budget_additive_mechanism(inst, {std::vector<Rational>(4, Rational(1)), Rational(2)}), InvalidInput);
}

TEST(BudgetAdditiveProperty, MarginalsOfCappedSum) {
  Rng rng(test_seed(601));
  for (int trial = 0; trial < 60; ++trial) {
    const int n = uniform_int(rng, 1, 5);
    Instance inst = random_instance(rng, n, uniform_int(rng, 1, 10), n);
    auto p = random_params(rng, n);
    Mechanism m = budget_additive_mechanism(inst, p);
    EXPECT_TRUE(verify_ic(inst, m).ok());
    for (std::size_t i = 0; i < inst.dist.entries.size(); ++i) {
      Rational sum = 0;
      Rational before = 0;
      for (std::size_t k = 0; k < m.alloc[i].size(); ++k) {
        sum += p.weights[static_cast<std::size_t>(inst.dist.entries[i].list[k])];
        Rational now = sum < p.budget ? sum : p.budget;
        EXPECT_EQ(m.alloc[i][k], now - before);
        before = now;
      }
    }
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
      Rational sum = 0;
      for (Item j : ItemSet(mask).items()) sum += p.weights[static_cast<std::size_t>(j)];
      EXPECT_EQ(budget_additive_value(p, ItemSet(mask)), sum < p.budget ? sum : p.budget);
    }
  }
}

TEST(TopK, LotteryGapTopTwo) {
  Instance inst = load_fixture("lottery_gap.json");
  auto best = best_topk_lottery(inst, 2);
  EXPECT_EQ(best.value, Rational(5, 4));
  EXPECT_EQ(best.k, 2);
  auto overall = best_topk_lottery(inst);
  EXPECT_EQ(overall.value, Rational(5, 4));
  EXPECT_THROW(best_topk_lottery(inst, 0), InvalidInput);
}

TEST(TopKProperty, MatchesExhaustiveOracle) {
  Rng rng(test_seed(602));
  for (int trial = 0; trial < 40; ++trial) {
    const int n = uniform_int(rng, 1, 4);
    Instance inst = random_instance(rng, n, uniform_int(rng, 1, 10), n);
    Rational best = -1;
    int best_k = 0;
    ItemSet best_support;
    for (int k = 1; k <= n; ++k) {
      for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
        Rational v = topk_oracle(inst, k, ItemSet(mask));
        EXPECT_EQ(mechanism_revenue(inst, budget_additive_mechanism(inst, topk_params(n, k, ItemSet(mask)))), v);
        if (v > best || (v == best && k == best_k && lex_less(ItemSet(mask), best_support))) {
          best = v;
          best_k = k;
          best_support = ItemSet(mask);
        }
      }
    }
    auto got = best_topk_lottery(inst);
    EXPECT_EQ(got.value, best);
    EXPECT_EQ(got.k, best_k);
    EXPECT_EQ(got.support, best_support);
  }
}

TEST(TopKGap, FamilyShape) {
  Instance inst = gen_topk_gap_instance(4, Rational(100));
  EXPECT_NO_THROW(validate_instance(inst));
  EXPECT_EQ(inst.price(3), Rational(100000000));
  auto top2 = best_topk_lottery(inst, 2);
  auto assortment = optimal_assortment(inst);
  EXPECT_GE(top2.value, Rational(2));
  EXPECT_LT(assortment.value, top2.value);
  EXPECT_THROW(gen_topk_gap_instance(4, Rational(1)), InvalidInput);
  Instance from_model = instance_from_model(load_fixture_json("topk_gap_model.json"));
  EXPECT_EQ(serialize_instance(from_model), serialize_instance(inst));
}

TEST(IndependentRevenue, MatchesEnumeration) {
  Rng rng(test_seed(603));
  for (int trial = 0; trial < 40; ++trial) {
    const int n = uniform_int(rng, 1, 6);
    Instance inst = random_instance(rng, n, uniform_int(rng, 1, 12), n);
    std::vector<double> inclusion;
    for (int j = 0; j < n; ++j) inclusion.push_back(std::uniform_real_distribution<double>(0, 1)(rng));
    EXPECT_NEAR(independent_assortment_revenue(inst, inclusion), independent_oracle(inst, inclusion), 1e-12);
  }
}

TEST(RoundingProperty, BudgetAdditiveGuarantee) {
  Rng rng(test_seed(604));
  for (int trial = 0; trial < 60; ++trial) {
    const int n = uniform_int(rng, 1, 6);
    Instance inst = random_instance(rng, n, uniform_int(rng, 1, 12), n);
    auto p = random_params(rng, n);
    auto rep = round_budget_additive(inst, p);
    for (std::size_t j = 0; j < p.weights.size(); ++j) {
      EXPECT_NEAR(rep.inclusion[j], 1 - std::exp(-to_double(p.weights[j])), 1e-15);
    }
    double lottery = to_double(mechanism_revenue(inst, budget_additive_mechanism(inst, p)));
    EXPECT_GE(independent_oracle(inst, rep.inclusion), lottery / std::exp(1.0) - 1e-9);
  }
}

TEST(RoundingProperty, BoundedLengthGuarantee) {
  Rng rng(test_seed(605));
  for (int trial = 0; trial < 60; ++trial) {
    const int len = uniform_int(rng, 1, 3);
    const int n = uniform_int(rng, len, 6);
    Instance inst = random_instance(rng, n, uniform_int(rng, 1, 12), len);
    auto opt = solve_mechanism_lp(inst);
    auto rep = round_bounded_length(inst, opt.mechanism);
    const double big_l = static_cast<double>(std::max<std::size_t>(1, inst.dist.max_length()));
    EXPECT_GE(independent_oracle(inst, rep.inclusion), 2 / (std::exp(1.0) * big_l) * to_double(opt.value()) - 1e-9);
    for (double z : rep.inclusion) EXPECT_LE(z, 1 / big_l + 1e-15);
  }
}

TEST(BudgetJson, RoundTrip) {
  Instance inst = load_fixture("lottery_gap.json");
  BudgetAdditiveParams p{{Rational(1, 2), Rational(1, 3), Rational(0), Rational(1)}, Rational(3, 4)};
  auto back = budget_params_from_json(inst, budget_params_to_json(inst, p));
  EXPECT_EQ(back.weights, p.weights);
  EXPECT_EQ(back.budget, p.budget);
}
