// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#include "fixedprice/errors.hpp"
#include "fixedprice/lotteries.hpp"
#include "fixedprice/mechanism.hpp"
#include "fixedprice/model_descriptor.hpp"
#include "fixedprice/multibuyer.hpp"
#include "fixedprice/robust.hpp"
#include "fixedprice/stopping.hpp"
#include "fixedprice/tree_diagram.hpp"
#include "fixtures.hpp"
#include "random_instances.hpp"

using namespace fixedprice;
using namespace fixedprice::testing;

namespace {

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

void require_eq(const Rational& got, const Rational& want, const std::string& what) {
  if (got != want) throw Failure{what + ": got " + to_string(got) + ", want " + to_string(want)};
}

RankedList ids_to_list(const Instance& inst, std::initializer_list<const char*> ids) {
  RankedList out;
  for (const char* id : ids) out.push_back(inst.item(id));
  return out;
}

// Exact expected revenue of offering each item independently, by enumerating
// all assortments.
double enumerated_independent_revenue(const Instance& inst, const std::vector<double>& inclusion) {
  double total = 0;
  const int n = inst.item_count();
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    double p = 1;
    for (int j = 0; j < n; ++j) p *= (mask >> j & 1U) ? inclusion[static_cast<std::size_t>(j)] : 1 - inclusion[static_cast<std::size_t>(j)];
    if (p > 0) total += p * to_double(assortment_revenue(inst, ItemSet(mask)));
  }
  return total;
}

std::string criterion_lottery_gap() {
  Instance inst = load_fixture("lottery_gap.json");
  auto best = optimal_assortment(inst);
  require_eq(best.value, Rational(7, 6), "optimal assortment revenue");
  require(best.assortment == ItemSet({inst.item("A"), inst.item("B")}), "optimal assortment is {A,B}");
  BudgetAdditiveParams half{std::vector<Rational>(4, Rational(1, 2)), Rational(1)};
  require_eq(mechanism_revenue(inst, budget_additive_mechanism(inst, half)), Rational(5, 4), "half-weight lottery revenue");
  auto lp = solve_mechanism_lp(inst);
  require(lp.value() >= Rational(5, 4), "mechanism LP below 5/4");
  return "OPT^S=7/6 at {A,B}, lottery=5/4, OPT^x=" + to_string(lp.value());
}

std::string criterion_mnl_markov() {
  Instance mnl = instance_from_model(load_fixture_json("mnl_three_items_model.json"));
  Instance chain = instance_from_model(load_fixture_json("markov_three_items_model.json"));
  auto a = canonical(mnl.dist);
  auto b = canonical(chain.dist);
  require(a.entries.size() == b.entries.size(), "support sizes differ");
  for (std::size_t k = 0; k < a.entries.size(); ++k) {
    require(a.entries[k].list == b.entries[k].list && a.entries[k].prob == b.entries[k].prob,
            "distributions differ at " + format_list(mnl, a.entries[k].list));
  }
  TreeDiagram tree(mnl.dist);
  const Rational expected_q[] = {Rational(1, 4), Rational(1, 3), Rational(1, 2)};
  std::vector<Item> perm{0, 1, 2};
  do {
    for (std::size_t depth = 1; depth <= 3; ++depth) {
      Prefix rho(perm.begin(), perm.begin() + static_cast<long>(depth));
      require_eq(tree.q(rho), expected_q[depth - 1], "q" + format_list(mnl, rho));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::to_string(a.entries.size()) + " lists identical; q = 1/4, 1/3, 1/2 by depth";
}

std::string criterion_markov_chain(Rng& rng) {
  int count = 0;
  for (; count < 100; ++count) {
    const int n = uniform_int(rng, 1, 5);
    MarkovChainParams params;
    Instance inst;
    do {
      params = random_markov_params(rng, n);
      inst = Instance{letter_ids(n), random_prices(rng, n), gen_markov_chain(params)};
    } while (inst.dist.entries.size() > 60);
    auto assortment = optimal_assortment(inst);
    auto mech = solve_mechanism_lp(inst);
    require_eq(mech.value(), assortment.value, "OPT^x vs OPT^S on Markov instance " + std::to_string(count));
    auto stop = markov_stopping_assortment(params, inst.prices);
    require_eq(stop.revenue, assortment.value, "optimal stopping value vs OPT^S");
    require_eq(assortment_revenue(inst, stop.stop_set), assortment.value, "revenue of the stopping set");
  }
  return std::to_string(count) + " instances, OPT^S = OPT^x = stopping value";
}

std::string criterion_history_monotone(Rng& rng) {
  int small = 0;
  for (int count = 0; count < 100; ++count) {
    Instance inst = random_history_monotone_instance(rng, 6, 60);
    auto assortment = optimal_assortment(inst);
    auto mech = solve_mechanism_lp(inst);
    require_eq(mech.value(), assortment.value, "OPT^x vs OPT^S on instance " + std::to_string(count));
    if (inst.item_count() <= 4) {
      ++small;
      auto f = solve_set_function_lp(inst);
      auto policy = optimal_policy_bruteforce(inst);
      require(mech.value() <= f.value(), "OPT^x > OPT^f");
      require(f.value() <= policy.value, "OPT^f > OPT^phi");
    }
  }
  return "100 instances with OPT^S = OPT^x; chain OPT^x <= OPT^f <= OPT^phi on " + std::to_string(small);
}

std::string criterion_condition_checker() {
  Instance bad = load_fixture("not_history_monotone.json");
  auto r3 = check_history_monotone(bad.dist);
  require(!r3.holds && r3.witness, "known counterexample should fail");
  const auto& w = *r3.witness;
  require(w.rho == ids_to_list(bad, {"C", "B"}) && w.rho_prime == ids_to_list(bad, {"B"}) &&
              w.assortment == ItemSet({bad.item("A")}) && w.item == bad.item("A"),
          "counterexample witness");
  require(!check_history_monotone(load_fixture("lottery_gap.json").dist).holds, "lottery-gap instance should fail");
  Instance layered = load_fixture("tiers.json");
  require(check_history_monotone(layered.dist).holds, "tier example should pass");
  auto tiers = tier_decomposition(layered, ItemSet({layered.item("A")}), layered.item("B"));
  std::vector<std::vector<RankedList>> want{{ids_to_list(layered, {"B"})},
                                            {ids_to_list(layered, {"C", "B"}), ids_to_list(layered, {"D", "B"})},
                                            {ids_to_list(layered, {"C", "D", "B"}), ids_to_list(layered, {"D", "C", "B"})}};
  require(tiers.size() == want.size(), "tier count " + std::to_string(tiers.size()));
  for (std::size_t t = 0; t < tiers.size(); ++t) {
    auto got = tiers[t].prefixes;
    std::sort(got.begin(), got.end());
    require(got == want[t], "tier " + std::to_string(t + 1));
  }
  require(tiers[1].kind == TierKind::Incomparable && tiers[2].kind == TierKind::SameSet, "tier kinds");
  return "witness ((CB),(B),{A},A); lottery-gap instance fails; tiers [{(B)},{(CB),(DB)},{(CDB),(DCB)}]";
}

std::string criterion_adjusted_revenue(Rng& rng) {
  for (int count = 0; count < 50; ++count) {
    const int n = uniform_int(rng, 1, 4);
    Instance inst = random_instance(rng, n, uniform_int(rng, 1, 8), n);
    ItemSet s(static_cast<std::uint32_t>(uniform_int(rng, 0, (1 << n) - 1)));
    StoppingRule rule = random_rule_stopping_on(rng, n, s);
    auto check = adjusted_revenue_identity(inst, s, rule);
    Rational gap = stopping_rule_revenue(inst, rule) - assortment_revenue(inst, s);
    require_eq(check.revenue_gap, gap, "revenue gap");
    require_eq(check.adjusted_revenue, gap, "adjusted revenue");
  }
  return "50 (instance, S, rule) triples, both sides equal";
}

std::string criterion_rounding(Rng& rng) {
  double worst_ba = 1e9;
  for (int count = 0; count < 100; ++count) {
    const int n = uniform_int(rng, 1, 6);
    Instance inst = random_instance(rng, n, uniform_int(rng, 1, 20), n);
    BudgetAdditiveParams params;
    for (int j = 0; j < n; ++j) params.weights.push_back(random_rational(rng, 4, 4) / 2);
    params.budget = 1;
    auto rep = round_budget_additive(inst, params);
    double lottery = to_double(mechanism_revenue(inst, budget_additive_mechanism(inst, params)));
    double rounded = enumerated_independent_revenue(inst, rep.inclusion);
    require(std::abs(rounded - rep.rounded_revenue) <= 1e-9, "rounded revenue mismatch");
    require(rounded >= lottery / std::exp(1.0) - 1e-9, "budget-additive rounding below 1/e");
    if (lottery > 0) worst_ba = std::min(worst_ba, rounded / lottery);
  }
  double worst_len = 1e9;
  for (int count = 0; count < 100; ++count) {
    const int max_len = 1 + count % 3;
    const int n = uniform_int(rng, max_len, 6);
    Instance inst = random_instance(rng, n, uniform_int(rng, 1, 16), max_len);
    const auto length = static_cast<double>(std::max<std::size_t>(1, inst.dist.max_length()));
    auto mech = solve_mechanism_lp(inst);
    auto rep = round_bounded_length(inst, mech.mechanism);
    double rounded = enumerated_independent_revenue(inst, rep.inclusion);
    double bound = 2 / (std::exp(1.0) * length) * to_double(mech.value());
    require(std::abs(rounded - rep.rounded_revenue) <= 1e-9, "rounded revenue mismatch");
    require(rounded >= bound - 1e-9, "bounded-length rounding below 2/(eL)");
    if (mech.value() > 0) worst_len = std::min(worst_len, rounded / to_double(mech.value()) * length);
  }
  std::ostringstream out;
  out << "worst ratio " << worst_ba << " vs 1/e; worst L*ratio " << worst_len << " vs 2/e";
  return out.str();
}

std::string criterion_containment(Rng& rng) {
  for (int count = 0; count < 100; ++count) {
    const int n = uniform_int(rng, 1, 5);
    Instance inst = random_instance(rng, n, uniform_int(rng, 1, 16), n);
    auto mech = solve_mechanism_lp(inst);
    auto witness = containment_witness(inst, mech.mechanism);
    require(witness.ok(), "containment fails: " + (witness.violations.empty() ? "" : witness.violations.front()));
    require(mech.value() <= solve_bm_lp(inst).value, "OPT^x > OPT^BM");
  }
  return "100 vertex optima contained; OPT^x <= OPT^BM throughout";
}

std::string criterion_topk_gap() {
  Instance inst = instance_from_model(load_fixture_json("topk_gap_model.json"));
  auto lottery = best_topk_lottery(inst, 2);
  auto assortment = optimal_assortment(inst);
  require(lottery.value >= 2, "top-2 lottery below n/2");
  require(assortment.value < lottery.value, "assortment not below top-2 lottery");
  return "top-2 = " + to_string(lottery.value) + ", OPT^S = " + to_string(assortment.value);
}

std::string criterion_robust() {
  Instance inst = load_fixture("robust_gap.json");
  auto mech = solve_mechanism_lp(inst);
  require_eq(mech.value(), Rational(21, 16), "OPT^x");
  Menu menu = menu_from_json(inst, load_fixture_json("robust_gap_menu.json"));
  require_eq(robust_revenue(inst, menu), Rational(11, 8), "robust revenue of the seven-entry menu");
  for (const char* mid : {"2", "3", "4"}) {
    auto exposable = exposable_entries(inst, menu, ids_to_list(inst, {mid, "5", "1"}));
    require(exposable.size() == 2, std::string("exposable entries for (") + mid + ",5,1)");
  }
  require_eq(robust_revenue(inst, mechanism_to_menu(inst, mech.mechanism)), Rational(21, 16), "menu of the LP optimum");
  return "OPT^x=21/16, menu=11/8, two exposable entries each, LP menu=21/16";
}

std::string criterion_multibuyer() {
  MultiBuyerInstance inst = load_multibuyer_fixture("two_buyers.json");
  require_eq(solve_multibuyer_lp(inst, IncentiveMode::DominantStrategy), Rational(16, 9), "DSIC");
  require_eq(solve_multibuyer_lp(inst, IncentiveMode::Bayesian), Rational(16, 9), "BIC");
  const Item a = 0;
  const Item b = 1;
  FixedMechanism ttc{FixedMechanism::Kind::TopTradingCycles, {}, {b, a}};
  require_eq(eval_fixed_multibuyer_mechanism(inst, ttc), Rational(16, 9), "TTC");
  ttc.endowment = {a, b};
  require_eq(eval_fixed_multibuyer_mechanism(inst, ttc), Rational(14, 9), "TTC reversed");
  FixedMechanism serial{FixedMechanism::Kind::SerialDictatorship, {0, 1}, {}};
  require_eq(eval_fixed_multibuyer_mechanism(inst, serial), Rational(5, 3), "serial dictatorship");
  return "DSIC=BIC=16/9, TTC 16/9 and 14/9, serial 15/9";
}

double max_nl_error(const ListDistribution& dist, const NestedLogitParams& params) {
  double worst = 0;
  const int n = dist.item_count;
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask) {
    ItemSet s(mask);
    for (Item j : s.items()) {
      Real diff = to_real(choice_probability(dist, s, j)) - nested_logit_choice_prob(params, s, j);
      worst = std::max(worst, std::abs(static_cast<double>(diff)));
    }
  }
  return worst;
}

std::string criterion_nested_logit() {
  double worst = 0;
  const std::vector<std::array<Real, 5>> three = {
      {1, 1, 1, 1, Real(1) / 2}, {1, Real(3) / 2, 2, 1, Real(7) / 10}, {Real(1) / 2, 1, Real(3) / 4, 2, Real(9) / 10}};
  for (const auto& c : three) {
    auto dist = gen_nested_logit_3item({c[0], c[1], c[2]}, c[3], c[4]);
    worst = std::max(worst, max_nl_error(dist, single_nest_params({c[0], c[1], c[2]}, c[3], c[4])));
    require(check_history_monotone(dist, default_tolerance()).holds, "3-item nested logit not history-monotone");
  }
  for (const auto& [w, gamma] : std::vector<std::pair<Real, Real>>{{1, Real(1) / 2}, {2, Real(4) / 5}}) {
    auto dist = gen_nested_logit_4item_symmetric(w, gamma);
    worst = std::max(worst, max_nl_error(dist, single_nest_params(std::vector<Real>(4, w), 1, gamma)));
    require(check_history_monotone(dist, default_tolerance()).holds, "4-item nested logit not history-monotone");
  }
  require(worst <= 1e-9, "choice probabilities off by " + std::to_string(worst));
  Real gap_one = nl_markov_fit_gap(1, 1);
  Real gap_half = nl_markov_fit_gap(1, Real(1) / 2);
  require(abs(gap_one) <= Real(1e-12), "fit gap at gamma=1");
  require(abs(gap_half) > Real(1e-6), "fit gap at gamma=1/2");
  std::ostringstream out;
  out << "max error " << worst << "; fit gap " << static_cast<double>(gap_half) << " at gamma=1/2";
  return out.str();
}

std::string criterion_integrality(Rng& rng) {
  for (int count = 0; count < 50; ++count) {
    const int n = uniform_int(rng, 1, 5);
    Instance inst = random_instance(rng, n, uniform_int(rng, 1, 20), n);
    auto opt = solve_set_function_lp(inst);
    for (const auto& v : opt.f.values) require(v == 0 || v == 1, "fractional value " + to_string(v));
  }
  return "50 vertex optima, all 0/1";
}

std::string criterion_mixture_policy() {
  Instance inst = load_fixture("mixture_abc.json");
  auto best = optimal_policy_bruteforce(inst);
  require_eq(best.value, Rational(1), "optimal monotone policy");
  const Item a = inst.item("A");
  const Item b = inst.item("B");
  const Item c = inst.item("C");
  StoppingRule rule = [=](Item j, ItemSet seen) {
    if (j == c) return true;
    if (j == b) return !seen.contains(a);
    return false;
  };
  require_eq(stopping_rule_revenue(inst, rule), Rational(3, 2), "non-monotone rule");
  return "monotone optimum 1, non-monotone rule 3/2";
}

}  // namespace

int main() {
  Rng rng(test_seed(20241015));
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria = {
      {"1 lottery beats assortment", criterion_lottery_gap},
      {"2 three-item MNL equals Markov chain", criterion_mnl_markov},
      {"3 Markov chain OPT^S = OPT^x", [&] { return criterion_markov_chain(rng); }},
      {"4 history-monotone OPT^S = OPT^x", [&] { return criterion_history_monotone(rng); }},
      {"5 condition checker and tiers", criterion_condition_checker},
      {"6 adjusted revenue identity", [&] { return criterion_adjusted_revenue(rng); }},
      {"7 rounding guarantees", [&] { return criterion_rounding(rng); }},
      {"8 containment in the tighter LP", [&] { return criterion_containment(rng); }},
      {"9 top-k gap family", criterion_topk_gap},
      {"10 robust menus", criterion_robust},
      {"11 multi-buyer example", criterion_multibuyer},
      {"12 nested logit representations", criterion_nested_logit},
      {"13 set-function LP integrality", [&] { return criterion_integrality(rng); }},
      {"14 monotone stopping constraint binds", criterion_mixture_policy},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      detail = run();
      ok = true;
    } catch (const Failure& f) {
      detail = f.what;
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << " (" << std::fixed << std::setprecision(2) << seconds
              << "s): " << detail << std::endl;
    if (!ok) ++failed;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
