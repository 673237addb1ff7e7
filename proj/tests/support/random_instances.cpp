#include "random_instances.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

namespace fixedprice::testing {

std::uint64_t test_seed(std::uint64_t fallback) {
  if (const char* env = std::getenv("FIXEDPRICE_SEED")) return std::strtoull(env, nullptr, 10);
  return fallback;
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Rational random_rational(Rng& rng, int max_num, int max_den) {
  Rational q(uniform_int(rng, 0, max_num), uniform_int(rng, 1, max_den));
  q.canonicalize();
  return q;
}

std::vector<Rational> random_prices(Rng& rng, int n) {
  std::vector<Rational> prices;
  for (int j = 0; j < n; ++j) prices.push_back(uniform_int(rng, 0, 5) == 0 ? Rational(0) : random_rational(rng, 9, 4) + 1);
  return prices;
}

std::vector<std::string> letter_ids(int n) {
  std::vector<std::string> ids;
  for (int j = 0; j < n; ++j) ids.emplace_back(1, static_cast<char>('A' + j));
  return ids;
}

ListDistribution random_distribution(Rng& rng, int n, int lists, int max_length) {
  ListDistribution dist;
  dist.item_count = n;
  Rational total = 0;
  for (int attempt = 0; static_cast<int>(dist.entries.size()) < lists && attempt < 50 * lists; ++attempt) {
    std::vector<Item> perm(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) perm[static_cast<std::size_t>(j)] = j;
    std::shuffle(perm.begin(), perm.end(), rng);
    perm.resize(static_cast<std::size_t>(uniform_int(rng, 0, std::min(n, max_length))));
    if (dist.find(perm)) continue;
    Rational w(uniform_int(rng, 1, 6));
    dist.entries.push_back({perm, w});
    total += w;
  }
  for (auto& e : dist.entries) e.prob /= total;
  return dist;
}

Instance random_instance(Rng& rng, int n, int lists, int max_length) {
  return Instance{letter_ids(n), random_prices(rng, n), random_distribution(rng, n, lists, max_length)};
}

namespace {

// Random probability vector over `slots` positions with at most `nonzero`
// positive entries.
std::vector<Rational> sparse_simplex(Rng& rng, std::size_t slots, int nonzero) {
  std::vector<Rational> out(slots, Rational(0));
  Rational total = 0;
  for (int k = 0; k < nonzero; ++k) {
    auto at = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(slots) - 1));
    Rational w(uniform_int(rng, 1, 5));
    out[at] += w;
    total += w;
  }
  for (auto& v : out) v /= total;
  return out;
}

}  // namespace

MarkovChainParams random_markov_params(Rng& rng, int n) {
  MarkovChainParams p;
  const auto sn = static_cast<std::size_t>(n);
  // Slot n is the no-purchase option.
  auto start = sparse_simplex(rng, sn + 1, 2);
  p.arrival.assign(start.begin(), start.begin() + n);
  p.arrival_none = start[sn];
  p.transition.assign(sn, std::vector<Rational>(sn, Rational(0)));
  p.exit.assign(sn, Rational(0));
  for (std::size_t i = 0; i < sn; ++i) {
    auto row = sparse_simplex(rng, sn + 1, 2);
    // No self loops: fold any self mass into the exit.
    row[sn] += row[i];
    row[i] = 0;
    if (row[sn] == 0) {
      // Guarantee absorption with a little exit mass.
      for (auto& v : row) v *= Rational(3, 4);
      row[sn] = Rational(1, 4);
    }
    for (std::size_t k = 0; k < sn; ++k) p.transition[i][k] = row[k];
    p.exit[i] = row[sn];
  }
  return p;
}

Instance random_markov_instance(Rng& rng, int n, std::size_t max_lists) {
  for (;;) {
    auto p = random_markov_params(rng, n);
    auto dist = gen_markov_chain(p);
    if (dist.entries.size() <= max_lists) return Instance{letter_ids(n), random_prices(rng, n), dist};
  }
}

Instance random_history_monotone_instance(Rng& rng, int max_n, std::size_t max_lists) {
  for (;;) {
    const int n = uniform_int(rng, 2, max_n);
    Instance inst;
    switch (uniform_int(rng, 0, 4)) {
      case 0:
        inst = random_markov_instance(rng, std::min(n, 5), max_lists);
        break;
      case 1: {
        const int k = std::min(n, 3);
        std::vector<Rational> w;
        for (int j = 0; j < k; ++j) w.push_back(random_rational(rng, 4, 3) + 1);
        inst = Instance{letter_ids(k), random_prices(rng, k), gen_mnl({w, random_rational(rng, 3, 2) + 1})};
        break;
      }
      case 2: {
        const int k = std::min(n, 4);
        std::vector<Rational> w;
        for (int j = 0; j < k; ++j) w.push_back(random_rational(rng, 4, 3) + 1);
        std::vector<std::vector<Item>> nests(1);
        for (int j = 0; j < k; ++j) {
          if (!nests.back().empty() && uniform_int(rng, 0, 1) == 0) nests.emplace_back();
          nests.back().push_back(j);
        }
        inst = Instance{letter_ids(k), random_prices(rng, k), gen_elimination_by_aspects({w, Rational(1), nests})};
        break;
      }
      case 3: {
        inst = random_markov_instance(rng, std::min(n, 4), max_lists);
        std::vector<Rational> alpha;
        for (int j = 0; j < inst.item_count(); ++j) alpha.push_back(random_rational(rng, 1, 4) / (2 * inst.item_count()));
        inst.dist = mix_with_singletons(inst.dist, alpha);
        break;
      }
      default:
        inst = random_instance(rng, n, uniform_int(rng, 1, 8), n);
        break;
    }
    if (inst.dist.entries.size() > max_lists) continue;
    if (check_history_monotone(inst.dist).holds) return inst;
  }
}

StoppingRule random_rule_stopping_on(Rng& rng, int n, ItemSet assortment) {
  auto bits = std::make_shared<std::vector<bool>>();
  const std::size_t size = static_cast<std::size_t>(n) << n;
  for (std::size_t k = 0; k < size; ++k) bits->push_back(uniform_int(rng, 0, 1) == 1);
  return [bits, n, assortment](Item item, ItemSet history) {
    if (assortment.contains(item)) return true;
    return static_cast<bool>((*bits)[(static_cast<std::size_t>(item) << n) | history.mask()]);
  };
}

std::string certify_lp_optimum(const RationalLP& lp, const LpSolution& sol) {
  if (sol.status != LpStatus::Optimal) return "status is " + to_string(sol.status);
  auto bad = lp.violations(sol.values);
  if (!bad.empty()) return "primal infeasible: " + bad.front();
  if (lp.evaluate_objective(sol.values) != sol.value) return "objective does not match reported value";
  const auto& vars = lp.variables();
  const auto& rows = lp.rows();
  if (sol.row_duals.size() != rows.size() || sol.upper_duals.size() != vars.size()) return "dual sizes";
  std::vector<Rational> reduced = lp.objective();
  reduced.resize(vars.size(), Rational(0));
  Rational dual_value = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Rational& y = sol.row_duals[r];
    if (rows[r].relation == Relation::LessEqual && y < 0) return "negative dual on <= row " + rows[r].name;
    if (rows[r].relation == Relation::GreaterEqual && y > 0) return "positive dual on >= row " + rows[r].name;
    for (const auto& t : rows[r].terms) reduced[static_cast<std::size_t>(t.var)] -= y * t.coef;
    dual_value += y * rows[r].rhs;
  }
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const Rational& w = sol.upper_duals[j];
    if (w < 0) return "negative upper-bound dual on " + vars[j].name;
    if (w != 0) {
      if (!vars[j].upper) return "dual on a missing upper bound";
      dual_value += w * *vars[j].upper;
    }
    reduced[j] -= w;
    if (vars[j].lower) {
      if (reduced[j] > 0) return "positive reduced cost on " + vars[j].name;
      dual_value += reduced[j] * *vars[j].lower;
    } else if (reduced[j] != 0) {
      return "nonzero reduced cost on free variable " + vars[j].name;
    }
  }
  if (dual_value != sol.value) return "dual value " + to_string(dual_value) + " != primal " + to_string(sol.value);
  return {};
}

}  // namespace fixedprice::testing
