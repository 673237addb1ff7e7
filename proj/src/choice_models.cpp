#include "fixedprice/choice_models.hpp"

#include <functional>
#include <map>
#include <unordered_map>

#include "exact_linear.hpp"
#include "fixedprice/errors.hpp"

namespace fixedprice {

namespace {

void check_item_count(std::size_t n, const char* model) {
  if (n < 1 || n > static_cast<std::size_t>(kMaxGeneratedItems)) {
    throw CapExceeded(std::string(model) + " generator supports 1.." +
                      std::to_string(kMaxGeneratedItems) + " items, got " + std::to_string(n));
  }
}

void check_positive(const std::vector<Rational>& weights, const Rational& w0, const char* model) {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0) {
      throw InvalidInput(std::string(model) + ": weight of item " + std::to_string(i) + " must be positive");
    }
  }
  if (w0 <= 0) throw InvalidInput(std::string(model) + ": no-purchase weight must be positive");
}

// Collects list probabilities keyed by list, keeping first-seen order.
class ListCollector {
 public:
  explicit ListCollector(int n) { dist_.item_count = n; }
  void add(const RankedList& list, const Rational& p) {
    if (p == 0) return;
    auto [it, inserted] = index_.try_emplace(list, dist_.entries.size());
    if (inserted) {
      dist_.entries.push_back({list, p});
    } else {
      dist_.entries[it->second].prob += p;
    }
  }
  ListDistribution take() { return std::move(dist_); }

 private:
  ListDistribution dist_;
  std::map<RankedList, std::size_t> index_;
};

}  // namespace

ListDistribution gen_mnl(const MnlParams& params) {
  const std::size_t n = params.weights.size();
  check_item_count(n, "MNL");
  check_positive(params.weights, params.no_purchase_weight, "MNL");
  ListCollector out(static_cast<int>(n));
  RankedList prefix;
  std::function<void(ItemSet, Rational, const Rational&)> walk = [&](ItemSet remaining, Rational remaining_weight,
                                                                      const Rational& p) {
    Rational total = params.no_purchase_weight + remaining_weight;
    out.add(prefix, p * params.no_purchase_weight / total);
    for (Item j : remaining.items()) {
      const Rational& w = params.weights[static_cast<std::size_t>(j)];
      prefix.push_back(j);
      walk(remaining.without(j), remaining_weight - w, p * w / total);
      prefix.pop_back();
    }
  };
  Rational all = 0;
  for (const auto& w : params.weights) all += w;
  walk(ItemSet::full(static_cast<int>(n)), all, Rational(1));
  return out.take();
}

namespace {

void validate_markov(const MarkovChainParams& p) {
  const std::size_t n = p.arrival.size();
  check_item_count(n, "Markov chain");
  if (p.transition.size() != n || p.exit.size() != n) {
    throw InvalidInput("Markov chain: transition and exit rows must match the item count");
  }
  Rational start = p.arrival_none;
  if (p.arrival_none < 0) throw InvalidInput("Markov chain: negative arrival probability");
  for (std::size_t j = 0; j < n; ++j) {
    if (p.arrival[j] < 0) throw InvalidInput("Markov chain: negative arrival probability");
    start += p.arrival[j];
    if (p.transition[j].size() != n) throw InvalidInput("Markov chain: transition row has wrong length");
    Rational row = p.exit[j];
    if (p.exit[j] < 0) throw InvalidInput("Markov chain: negative transition probability");
    for (const auto& t : p.transition[j]) {
      if (t < 0) throw InvalidInput("Markov chain: negative transition probability");
      row += t;
    }
    if (row != 1) {
      throw InvalidInput("Markov chain: transition row " + std::to_string(j) + " sums to " + to_string(row));
    }
  }
  if (start != 1) throw InvalidInput("Markov chain: arrival probabilities sum to " + to_string(start));
  // Every state must be able to reach the no-purchase state.
  std::vector<bool> reaches(n, false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (reaches[j]) continue;
      bool r = p.exit[j] > 0;
      for (std::size_t k = 0; k < n && !r; ++k) r = p.transition[j][k] > 0 && reaches[k];
      if (r) {
        reaches[j] = true;
        changed = true;
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!reaches[j]) {
      throw InvalidInput("Markov chain is not absorbing: state " + std::to_string(j) +
                         " never reaches no-purchase");
    }
  }
}

}  // namespace

ListDistribution gen_markov_chain(const MarkovChainParams& params) {
  validate_markov(params);
  const int n = static_cast<int>(params.arrival.size());
  // For a visited set V: row per state in V, column per unvisited item plus a
  // final column for absorption, holding the probability that the walk leaves
  // V there first.
  std::unordered_map<std::uint32_t, detail::Matrix> cache;
  auto first_exit = [&](ItemSet visited) -> const detail::Matrix& {
    auto it = cache.find(visited.mask());
    if (it != cache.end()) return it->second;
    auto inside = visited.items();
    const std::size_t k = inside.size();
    detail::Matrix a(k, std::vector<Rational>(k));
    detail::Matrix b(k, std::vector<Rational>(static_cast<std::size_t>(n) + 1));
    for (std::size_t r = 0; r < k; ++r) {
      const auto& row = params.transition[static_cast<std::size_t>(inside[r])];
      for (std::size_t c = 0; c < k; ++c) {
        a[r][c] = (r == c ? Rational(1) : Rational(0)) - row[static_cast<std::size_t>(inside[c])];
      }
      for (Item j = 0; j < n; ++j) {
        if (!visited.contains(j)) b[r][static_cast<std::size_t>(j)] = row[static_cast<std::size_t>(j)];
      }
      b[r][static_cast<std::size_t>(n)] = params.exit[static_cast<std::size_t>(inside[r])];
    }
    auto x = detail::solve_linear(std::move(a), std::move(b));
    if (!x) throw InvalidInput("Markov chain is not absorbing: singular transient system");
    // Re-index rows by item for lookup.
    detail::Matrix by_item(static_cast<std::size_t>(n));
    for (std::size_t r = 0; r < k; ++r) by_item[static_cast<std::size_t>(inside[r])] = std::move((*x)[r]);
    return cache.emplace(visited.mask(), std::move(by_item)).first->second;
  };

  ListCollector out(n);
  out.add({}, params.arrival_none);
  RankedList prefix;
  std::function<void(ItemSet, const Rational&)> walk = [&](ItemSet visited, const Rational& p) {
    const auto& row = first_exit(visited)[static_cast<std::size_t>(prefix.back())];
    out.add(prefix, p * row[static_cast<std::size_t>(n)]);
    for (Item j = 0; j < n; ++j) {
      if (visited.contains(j) || row[static_cast<std::size_t>(j)] == 0) continue;
      prefix.push_back(j);
      walk(visited.with(j), p * row[static_cast<std::size_t>(j)]);
      prefix.pop_back();
    }
  };
  for (Item j = 0; j < n; ++j) {
    if (params.arrival[static_cast<std::size_t>(j)] == 0) continue;
    prefix = {j};
    walk(ItemSet{j}, params.arrival[static_cast<std::size_t>(j)]);
  }
  auto dist = out.take();
  if (dist.total() != 1) throw InternalInconsistency("Markov chain lists sum to " + to_string(dist.total()));
  return dist;
}

ListDistribution gen_elimination_by_aspects(const EliminationByAspectsParams& params) {
  const std::size_t n = params.weights.size();
  check_item_count(n, "elimination-by-aspects");
  check_positive(params.weights, params.no_purchase_weight, "elimination-by-aspects");
  std::vector<int> nest_of(n, -1);
  for (std::size_t i = 0; i < params.nests.size(); ++i) {
    for (Item j : params.nests[i]) {
      if (j < 0 || static_cast<std::size_t>(j) >= n) {
        throw InvalidInput("elimination-by-aspects: nest refers to unknown item " + std::to_string(j));
      }
      if (nest_of[static_cast<std::size_t>(j)] != -1) {
        throw InvalidInput("elimination-by-aspects: item " + std::to_string(j) + " is in two nests");
      }
      nest_of[static_cast<std::size_t>(j)] = static_cast<int>(i);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (nest_of[j] == -1) throw InvalidInput("elimination-by-aspects: item " + std::to_string(j) + " has no nest");
  }
  auto weight_of = [&](ItemSet s) {
    Rational w = 0;
    for (Item j : s.items()) w += params.weights[static_cast<std::size_t>(j)];
    return w;
  };
  auto nest_set = [&](int i) { return ItemSet::of(params.nests[static_cast<std::size_t>(i)]); };

  ListCollector out(static_cast<int>(n));
  RankedList prefix;
  // `locked` holds the undrawn rest of the nest currently being drawn.
  std::function<void(ItemSet, ItemSet, const Rational&)> walk = [&](ItemSet remaining, ItemSet locked,
                                                                     const Rational& p) {
    if (!locked.empty()) {
      Rational total = weight_of(locked);
      for (Item j : locked.items()) {
        prefix.push_back(j);
        walk(remaining.without(j), locked.without(j), p * params.weights[static_cast<std::size_t>(j)] / total);
        prefix.pop_back();
      }
      return;
    }
    Rational total = params.no_purchase_weight + weight_of(remaining);
    out.add(prefix, p * params.no_purchase_weight / total);
    for (Item j : remaining.items()) {
      prefix.push_back(j);
      ItemSet rest = (nest_set(nest_of[static_cast<std::size_t>(j)]) & remaining).without(j);
      walk(remaining.without(j), rest, p * params.weights[static_cast<std::size_t>(j)] / total);
      prefix.pop_back();
    }
  };
  walk(ItemSet::full(static_cast<int>(n)), ItemSet(), Rational(1));
  return out.take();
}

ListDistribution mix_with_singletons(const ListDistribution& dist, const std::vector<Rational>& alpha) {
  if (alpha.size() != static_cast<std::size_t>(dist.item_count)) {
    throw InvalidInput("mixture weights must have one entry per item");
  }
  Rational mass = 0;
  for (const auto& a : alpha) {
    if (a < 0) throw InvalidInput("mixture weight is negative");
    mass += a;
  }
  if (mass > 1) throw InvalidInput("mixture weights sum to " + to_string(mass) + ", above 1");
  ListCollector out(dist.item_count);
  Rational keep = 1 - mass;
  for (const auto& e : dist.entries) out.add(e.list, keep * e.prob);
  for (std::size_t j = 0; j < alpha.size(); ++j) out.add({static_cast<Item>(j)}, alpha[j]);
  return out.take();
}

NestedLogitParams single_nest_params(std::vector<Real> weights, Real no_purchase_weight, Real dissimilarity) {
  NestedLogitParams p;
  std::vector<Item> all;
  for (std::size_t j = 0; j < weights.size(); ++j) all.push_back(static_cast<Item>(j));
  p.weights = std::move(weights);
  p.no_purchase_weight = std::move(no_purchase_weight);
  p.nests = {all};
  p.dissimilarity = {std::move(dissimilarity)};
  return p;
}

Real nested_logit_choice_prob(const NestedLogitParams& params, ItemSet assortment, Item j) {
  if (!assortment.contains(j)) throw InvalidInput("item is not in the assortment");
  if (params.nests.size() != params.dissimilarity.size()) {
    throw InvalidInput("nested logit: one dissimilarity parameter per nest is required");
  }
  Real denominator = params.no_purchase_weight;
  Real own_nest_weight = 0;
  Real own_nest_term = 0;
  bool found = false;
  for (std::size_t i = 0; i < params.nests.size(); ++i) {
    Real w = 0;
    bool has_j = false;
    for (Item k : params.nests[i]) {
      if (assortment.contains(k)) w += params.weights.at(static_cast<std::size_t>(k));
      has_j = has_j || k == j;
    }
    if (w == 0) continue;
    Real term = pow(w, params.dissimilarity[i]);
    denominator += term;
    if (has_j) {
      own_nest_weight = w;
      own_nest_term = term;
      found = true;
    }
  }
  if (!found) throw InvalidInput("nested logit: item belongs to no nest");
  return own_nest_term / denominator * params.weights.at(static_cast<std::size_t>(j)) / own_nest_weight;
}

namespace {

const Real& real_slack() {
  static const Real slack("1e-40");
  return slack;
}

void require_unit_interval(const Real& x, const std::string& what) {
  if (x < -real_slack() || x > 1 + real_slack()) {
    throw InvalidInput("nested logit fit: " + what + " = " + x.str(12) + " lies outside [0,1]");
  }
}

Real clamp_unit(const Real& x) {
  if (x < 0) return Real(0);
  if (x > 1) return Real(1);
  return x;
}

}  // namespace

ListDistribution distribution_from_reals(int item_count, const std::vector<std::pair<RankedList, Real>>& lists) {
  ListDistribution dist;
  dist.item_count = item_count;
  Rational sum = 0;
  for (const auto& [list, p] : lists) {
    Rational q = rational_from_real(clamp_unit(p), conversion_tolerance());
    if (q == 0) continue;
    dist.entries.push_back({list, q});
    sum += q;
  }
  if (sum == 0) throw InvalidInput("all list probabilities vanished");
  for (auto& e : dist.entries) e.prob /= sum;
  return dist;
}

ListDistribution gen_nested_logit_3item(const std::array<Real, 3>& weights, const Real& no_purchase_weight,
                                        const Real& dissimilarity) {
  for (const auto& w : weights) {
    if (w <= 0) throw InvalidInput("nested logit: weights must be positive");
  }
  if (no_purchase_weight <= 0) throw InvalidInput("nested logit: no-purchase weight must be positive");
  if (dissimilarity <= 0 || dissimilarity > 1) throw InvalidInput("nested logit: dissimilarity must lie in (0,1]");
  auto params = single_nest_params({weights[0], weights[1], weights[2]}, no_purchase_weight, dissimilarity);
  auto prob = [&](Item j, ItemSet s) { return nested_logit_choice_prob(params, s, j); };
  const ItemSet all = ItemSet::full(3);

  std::array<Real, 3> first;  // q(j)
  for (Item j = 0; j < 3; ++j) {
    first[static_cast<std::size_t>(j)] = prob(j, all);
    require_unit_interval(first[static_cast<std::size_t>(j)], "q(" + std::to_string(j) + ")");
  }
  // second[a][b] = q(a b)
  std::array<std::array<Real, 3>, 3> second{};
  for (Item a = 0; a < 3; ++a) {
    for (Item b = 0; b < 3; ++b) {
      if (a == b) continue;
      Real v = (prob(b, all.without(a)) - first[static_cast<std::size_t>(b)]) / first[static_cast<std::size_t>(a)];
      require_unit_interval(v, "q(" + std::to_string(a) + std::to_string(b) + ")");
      second[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = v;
    }
  }
  // third[c] = q(a b c) = q(b a c), the tied depth-three transition into c.
  std::array<Real, 3> third;
  for (Item c = 0; c < 3; ++c) {
    Item a = (c + 1) % 3;
    Item b = (c + 2) % 3;
    ItemSet only_c{c};
    Real numerator = prob(c, only_c) - prob(c, only_c.with(a)) - prob(c, only_c.with(b)) + prob(c, all);
    Real denominator = prob(b, ItemSet{b, c}) - prob(b, all) + prob(a, ItemSet{a, c}) - prob(a, all);
    Real v = numerator / denominator;
    require_unit_interval(v, "depth-three transition into " + std::to_string(c));
    third[static_cast<std::size_t>(c)] = v;
  }
  std::vector<std::pair<RankedList, Real>> lists;
  Real empty = 1;
  for (Item a = 0; a < 3; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    empty -= first[ua];
    Real stop_after_one = 1;
    for (Item b = 0; b < 3; ++b) {
      if (b == a) continue;
      const auto ub = static_cast<std::size_t>(b);
      stop_after_one -= second[ua][ub];
      Item c = 3 - a - b;
      Real path = first[ua] * second[ua][ub];
      Real full = path * third[static_cast<std::size_t>(c)];
      require_unit_interval(1 - third[static_cast<std::size_t>(c)], "stop probability after two items");
      lists.push_back({{a, b}, path - full});
      lists.push_back({{a, b, c}, full});
    }
    require_unit_interval(stop_after_one, "stop probability after one item");
    lists.push_back({{a}, first[ua] * stop_after_one});
  }
  require_unit_interval(empty, "no-purchase probability");
  lists.push_back({{}, empty});
  return distribution_from_reals(3, lists);
}

std::vector<Real> nested_logit_symmetric_transitions(int n, const Real& weight, const Real& dissimilarity) {
  if (n < 1 || n > 4) throw InvalidInput("symmetric nested logit fit supports 1..4 items");
  if (weight <= 0) throw InvalidInput("nested logit: weight must be positive");
  if (dissimilarity <= 0 || dissimilarity > 1) throw InvalidInput("nested logit: dissimilarity must lie in (0,1]");
  // chosen[k] = probability of buying one given item from an assortment of k.
  std::vector<Real> chosen(static_cast<std::size_t>(n) + 1);
  for (int k = 1; k <= n; ++k) {
    Real kw = weight * k;
    chosen[static_cast<std::size_t>(k)] = 1 / (Real(k) * (1 + pow(kw, -dissimilarity)));
  }
  // path[m] = q_{m+1} q_m ... q_1, by inclusion-exclusion over the m items
  // that were skipped.
  std::vector<Real> path(static_cast<std::size_t>(n));
  Real factorial = 1;
  for (int m = 0; m < n; ++m) {
    if (m > 0) factorial *= m;
    Real sum = 0;
    Real binom = 1;
    for (int mm = 0; mm <= m; ++mm) {
      if (mm > 0) binom = binom * (m - mm + 1) / mm;
      Real term = binom * chosen[static_cast<std::size_t>(n - mm)];
      sum += ((m - mm) % 2 == 0) ? term : Real(-term);
    }
    path[static_cast<std::size_t>(m)] = sum / factorial;
  }
  std::vector<Real> q(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    q[static_cast<std::size_t>(m)] =
        m == 0 ? path[0] : path[static_cast<std::size_t>(m)] / path[static_cast<std::size_t>(m - 1)];
    require_unit_interval(q[static_cast<std::size_t>(m)], "q_" + std::to_string(m + 1));
  }
  for (int k = 0; k + 1 < n; ++k) {
    Real lhs = 1 / q[static_cast<std::size_t>(k)];
    Real rhs = 1 / q[static_cast<std::size_t>(k + 1)] + 1;
    if (lhs < rhs - Real("1e-30") * rhs) {
      throw InvalidInput("symmetric nested logit fit: stop probability at depth " + std::to_string(k + 2) +
                         " would be negative");
    }
  }
  return q;
}

ListDistribution gen_nested_logit_4item_symmetric(const Real& weight, const Real& dissimilarity, int n) {
  auto q = nested_logit_symmetric_transitions(n, weight, dissimilarity);
  std::vector<std::pair<RankedList, Real>> lists;
  RankedList prefix;
  std::function<void(ItemSet, const Real&)> walk = [&](ItemSet remaining, const Real& p) {
    const std::size_t depth = prefix.size();
    Real stop = depth < static_cast<std::size_t>(n) ? Real(1 - (n - static_cast<int>(depth)) * q[depth]) : Real(1);
    require_unit_interval(stop, "stop probability at depth " + std::to_string(depth + 1));
    lists.push_back({prefix, p * stop});
    for (Item j : remaining.items()) {
      prefix.push_back(j);
      walk(remaining.without(j), p * q[depth]);
      prefix.pop_back();
    }
  };
  walk(ItemSet::full(n), Real(1));
  return distribution_from_reals(n, lists);
}

Real nl_markov_fit_gap(const Real& weight, const Real& dissimilarity) {
  const Real& w = weight;
  const Real& g = dissimilarity;
  Real single = pow(w, g) / (1 + pow(w, g));
  Real three = pow(3 * w, g);
  Real arrival = three / (1 + three) / 3;
  Real stay = (pow(3 * w, -g) + 1) / (pow(2 * w, -g) + 1) * 3 / 2 - 1;
  Real fitted = arrival * (1 + 2 / (1 / stay - 1));
  return fitted - single;
}

}  // namespace fixedprice
