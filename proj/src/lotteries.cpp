#include "fixedprice/lotteries.hpp"

#include <cmath>

#include "fixedprice/errors.hpp"

namespace fixedprice {

namespace {

std::size_t as_index(Item j) { return static_cast<std::size_t>(j); }

void check_budget(const BudgetAdditiveParams& p, int n) {
  if (p.weights.size() != static_cast<std::size_t>(n)) throw InvalidInput("budget-additive weights need one entry per item");
  for (const auto& w : p.weights) {
    if (w < 0) throw InvalidInput("budget-additive weights must be nonnegative");
  }
  if (p.budget < 0 || p.budget > 1) throw InvalidInput("budget must lie in [0,1]");
}

}  // namespace

Rational budget_additive_value(const BudgetAdditiveParams& params, ItemSet s) {
  Rational sum = 0;
  for (Item j : s.items()) sum += params.weights.at(as_index(j));
  return sum < params.budget ? sum : params.budget;
}

Mechanism budget_additive_mechanism(const Instance& inst, const BudgetAdditiveParams& params) {
  check_budget(params, inst.item_count());
  Mechanism m = zero_mechanism(inst);
  for (std::size_t i = 0; i < inst.dist.entries.size(); ++i) {
    const auto& list = inst.dist.entries[i].list;
    Rational used = 0;
    for (std::size_t k = 0; k < list.size(); ++k) {
      Rational next = used + params.weights[as_index(list[k])];
      if (next > params.budget) next = params.budget;
      m.alloc[i][k] = next - used;
      used = next;
    }
  }
  return m;
}

BudgetAdditiveParams topk_params(int item_count, int k, ItemSet support) {
  if (k < 1) throw InvalidInput("k must be at least 1");
  BudgetAdditiveParams p;
  p.weights.assign(static_cast<std::size_t>(item_count), Rational(0));
  for (Item j : support.items()) p.weights[as_index(j)] = Rational(1, k);
  p.budget = 1;
  return p;
}

namespace {

// Revenue of the top-k lottery on `support`: each of the first k supported
// items on a list is sold with probability 1/k.
Rational topk_revenue(const Instance& inst, int k, ItemSet support) {
  Rational revenue = 0;
  for (const auto& e : inst.dist.entries) {
    Rational top = 0;
    int taken = 0;
    for (Item j : e.list) {
      if (taken == k) break;
      if (support.contains(j)) {
        top += inst.price(j);
        ++taken;
      }
    }
    revenue += e.prob * top;
  }
  return revenue / k;
}

}  // namespace

TopKLottery best_topk_lottery(const Instance& inst, std::optional<int> k, int cap) {
  const int n = inst.item_count();
  if (n > cap) {
    throw CapExceeded("top-k search over " + std::to_string(n) + " items exceeds the cap of " + std::to_string(cap));
  }
  if (k && (*k < 1 || *k > std::max(n, 1))) throw InvalidInput("k must lie in 1..n");
  int k_lo = k ? *k : 1;
  int k_hi = k ? *k : std::max(n, 1);
  std::optional<TopKLottery> best;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (int kk = k_lo; kk <= k_hi; ++kk) {
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      ItemSet s(static_cast<std::uint32_t>(mask));
      Rational v = topk_revenue(inst, kk, s);
      if (!best || v > best->value || (v == best->value && kk == best->k && lex_less(s, best->support))) {
        best = TopKLottery{kk, s, v};
      }
    }
  }
  return *best;
}

double independent_assortment_revenue(const Instance& inst, const std::vector<double>& inclusion) {
  if (inclusion.size() != static_cast<std::size_t>(inst.item_count())) {
    throw InvalidInput("inclusion probabilities need one entry per item");
  }
  double revenue = 0;
  for (const auto& e : inst.dist.entries) {
    double none_before = 1;
    double r = 0;
    for (Item j : e.list) {
      r += to_double(inst.price(j)) * inclusion[as_index(j)] * none_before;
      none_before *= 1 - inclusion[as_index(j)];
    }
    revenue += to_double(e.prob) * r;
  }
  return revenue;
}

RoundingReport round_budget_additive(const Instance& inst, const BudgetAdditiveParams& params) {
  check_budget(params, inst.item_count());
  RoundingReport rep;
  for (const auto& w : params.weights) rep.inclusion.push_back(1 - std::exp(-to_double(w)));
  rep.rounded_revenue = independent_assortment_revenue(inst, rep.inclusion);
  rep.guarantee = to_double(mechanism_revenue(inst, budget_additive_mechanism(inst, params))) / std::exp(1.0);
  if (rep.rounded_revenue < rep.guarantee - kRoundingSlack) {
    throw InternalInconsistency("independent rounding earned " + std::to_string(rep.rounded_revenue) +
                                ", below the guaranteed " + std::to_string(rep.guarantee));
  }
  return rep;
}

RoundingReport round_bounded_length(const Instance& inst, const Mechanism& m) {
  const auto report = verify_ic(inst, m);
  if (!report.feasibility_problems.empty()) throw InvalidInput(report.feasibility_problems.front());
  RoundingReport rep;
  const double length = static_cast<double>(inst.dist.max_length());
  std::vector<Rational> top(as_index(inst.item_count()), Rational(0));
  for (std::size_t i = 0; i < inst.dist.entries.size(); ++i) {
    const auto& list = inst.dist.entries[i].list;
    for (std::size_t k = 0; k < list.size(); ++k) {
      if (m.alloc[i][k] > top[as_index(list[k])]) top[as_index(list[k])] = m.alloc[i][k];
    }
  }
  for (const auto& a : top) {
    if (length == 0) {
      rep.inclusion.push_back(0);
    } else if (a <= Rational(1, 2)) {
      rep.inclusion.push_back(2 * to_double(a) / length);
    } else {
      rep.inclusion.push_back(1 / length);
    }
  }
  rep.rounded_revenue = independent_assortment_revenue(inst, rep.inclusion);
  rep.guarantee = length == 0 ? 0 : 2 / (std::exp(1.0) * length) * to_double(mechanism_revenue(inst, m));
  if (rep.rounded_revenue < rep.guarantee - kRoundingSlack) {
    throw InternalInconsistency("bounded-length rounding earned " + std::to_string(rep.rounded_revenue) +
                                ", below the guaranteed " + std::to_string(rep.guarantee));
  }
  return rep;
}

Instance gen_topk_gap_instance(int n, const Rational& base) {
  if (n < 1 || n > 8) throw InvalidInput("gap family supports 1..8 items");
  if (base <= 1) throw InvalidInput("gap family needs a base above 1");
  Instance inst;
  Rational price = 1;
  for (int j = 1; j <= n; ++j) {
    price *= base;
    inst.item_ids.push_back(std::to_string(j));
    inst.prices.push_back(price);
  }
  inst.dist.item_count = n;
  Rational used = 0;
  Rational top = 1;
  for (int j = 1; j <= n; ++j) {
    top /= base;
    if (j == 1) {
      inst.dist.entries.push_back({{0}, top});
    } else {
      for (int cheaper = 1; cheaper < j; ++cheaper) {
        inst.dist.entries.push_back({{cheaper - 1, j - 1}, top / (j - 1)});
      }
    }
    used += top;
  }
  inst.dist.entries.push_back({{}, 1 - used});
  validate_instance(inst);
  return inst;
}

BudgetAdditiveParams budget_params_from_json(const Instance& inst, const Json& doc) {
  if (!doc.is_object()) throw InvalidInput("budget parameters: expected an object");
  BudgetAdditiveParams p;
  p.weights.assign(as_index(inst.item_count()), Rational(0));
  if (doc.contains("weights")) {
    if (!doc["weights"].is_object()) throw InvalidInput("/weights: expected an object");
    for (const auto& [id, w] : doc["weights"].items()) p.weights[as_index(inst.item(id))] = rational_from_json(w, "/weights/" + id);
  }
  p.budget = doc.contains("budget") ? rational_from_json(doc["budget"], "/budget") : Rational(1);
  check_budget(p, inst.item_count());
  return p;
}

Json budget_params_to_json(const Instance& inst, const BudgetAdditiveParams& params) {
  Json weights = Json::object();
  for (std::size_t j = 0; j < params.weights.size(); ++j) weights[inst.item_ids[j]] = rational_to_json(params.weights[j]);
  return Json{{"weights", weights}, {"budget", rational_to_json(params.budget)}};
}

}  // namespace fixedprice
