#include "fixedprice/stopping.hpp"

#include <algorithm>
#include <climits>
#include <numeric>

#include "exact_linear.hpp"
#include "fixedprice/errors.hpp"

namespace fixedprice {

namespace {

std::size_t as_index(Item j) { return static_cast<std::size_t>(j); }

std::vector<ItemSet> minimize(std::vector<ItemSet> sets) {
  std::vector<ItemSet> out;
  for (ItemSet s : sets) {
    bool dominated = false;
    for (ItemSet t : sets) {
      if (t != s && t.subset_of(s)) dominated = true;
    }
    if (!dominated && std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](ItemSet a, ItemSet b) { return lex_less(a, b); });
  return out;
}

}  // namespace

MonotoneStoppingPolicy::MonotoneStoppingPolicy(int item_count)
    : item_count_(item_count), minimal_(static_cast<std::size_t>(item_count)) {}

MonotoneStoppingPolicy MonotoneStoppingPolicy::from_minimal_sets(int item_count,
                                                                 std::vector<std::vector<ItemSet>> minimal) {
  if (minimal.size() != static_cast<std::size_t>(item_count)) {
    throw InvalidInput("stopping policy needs one family per item");
  }
  MonotoneStoppingPolicy p(item_count);
  for (std::size_t j = 0; j < minimal.size(); ++j) {
    for (ItemSet s : minimal[j]) {
      if (s.contains(static_cast<Item>(j))) throw InvalidInput("a history of an item cannot contain the item");
    }
    p.minimal_[j] = minimize(std::move(minimal[j]));
  }
  return p;
}

MonotoneStoppingPolicy MonotoneStoppingPolicy::from_assortment(int item_count, ItemSet assortment) {
  MonotoneStoppingPolicy p(item_count);
  for (Item j : assortment.items()) p.minimal_[as_index(j)] = {ItemSet()};
  return p;
}

bool MonotoneStoppingPolicy::stops(Item item, ItemSet history) const {
  for (ItemSet s : minimal_.at(as_index(item))) {
    if (s.subset_of(history)) return true;
  }
  return false;
}

StoppingRule MonotoneStoppingPolicy::rule() const {
  return [policy = *this](Item item, ItemSet history) { return policy.stops(item, history); };
}

Rational stopping_rule_revenue(const Instance& inst, const StoppingRule& rule) {
  TreeDiagram tree(inst.dist);
  Rational revenue = 0;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    for (int child : tree.node(id).children) {
      const auto& node = tree.node(child);
      Item e = endpoint(node.prefix);
      if (rule(e, to_set(node.prefix).without(e))) {
        revenue += inst.price(e) * node.prob;
      } else {
        stack.push_back(child);
      }
    }
  }
  return revenue;
}

Rational policy_revenue(const Instance& inst, const MonotoneStoppingPolicy& policy) {
  if (policy.item_count() != inst.item_count()) throw InvalidInput("policy and instance disagree on the item count");
  return stopping_rule_revenue(inst, policy.rule());
}

namespace {

// Truth tables indexed by full history mask; bit H is 1 when the item stops
// on history H.
std::vector<std::uint32_t> monotone_tables(int n, Item item) {
  std::vector<Item> ground;
  for (Item k = 0; k < n; ++k) {
    if (k != item) ground.push_back(k);
  }
  const int g = static_cast<int>(ground.size());
  const std::uint32_t subsets = std::uint32_t{1} << g;
  std::vector<std::uint32_t> full_mask(subsets);
  for (std::uint32_t a = 0; a < subsets; ++a) {
    std::uint32_t m = 0;
    for (int b = 0; b < g; ++b) {
      if (a >> b & 1U) m |= std::uint32_t{1} << ground[static_cast<std::size_t>(b)];
    }
    full_mask[a] = m;
  }
  std::vector<std::uint32_t> out;
  const std::uint64_t candidates = std::uint64_t{1} << subsets;
  for (std::uint64_t t = 0; t < candidates; ++t) {
    bool monotone = true;
    for (std::uint32_t a = 0; a < subsets && monotone; ++a) {
      if (!(t >> a & 1U)) continue;
      for (int b = 0; b < g; ++b) {
        std::uint32_t up = a | (std::uint32_t{1} << b);
        if (!(t >> up & 1U)) {
          monotone = false;
          break;
        }
      }
    }
    if (!monotone) continue;
    std::uint32_t table = 0;
    for (std::uint32_t a = 0; a < subsets; ++a) {
      if (t >> a & 1U) table |= std::uint32_t{1} << full_mask[a];
    }
    out.push_back(table);
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct FlatNode {
  Item endpoint;
  std::uint32_t history;
  std::vector<int> children;
};

template <class Weight>
Weight evaluate(const std::vector<FlatNode>& nodes, const std::vector<Weight>& weight,
                const std::vector<std::uint32_t>& tables, std::vector<int>& stack) {
  Weight total = 0;
  stack.assign(nodes[0].children.begin(), nodes[0].children.end());
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    const auto& node = nodes[static_cast<std::size_t>(id)];
    if (tables[as_index(node.endpoint)] >> node.history & 1U) {
      total += weight[static_cast<std::size_t>(id)];
    } else {
      stack.insert(stack.end(), node.children.begin(), node.children.end());
    }
  }
  return total;
}

}  // namespace

PolicyOptimum optimal_policy_bruteforce(const Instance& inst, int cap) {
  const int n = inst.item_count();
  if (n > cap || n > 5) {
    throw CapExceeded("brute-force policy search over " + std::to_string(n) +
                      " items exceeds the cap of " + std::to_string(std::min(cap, 5)) +
                      "; monotone functions per item grow like the Dedekind numbers (20 at 3 elements, 168 at 4, 7581 at 5)");
  }
  TreeDiagram tree(inst.dist);
  std::vector<FlatNode> nodes;
  std::vector<Rational> weight;
  for (const auto& node : tree.nodes()) {
    if (node.parent < 0) {
      nodes.push_back({-1, 0, node.children});
      weight.emplace_back(0);
      continue;
    }
    Item e = endpoint(node.prefix);
    nodes.push_back({e, to_set(node.prefix).without(e).mask(), node.children});
    weight.push_back(inst.price(e) * node.prob);
  }
  // Common denominator so that policies are compared with integer sums.
  mpz_class denominator = 1;
  for (const auto& w : weight) mpz_lcm(denominator.get_mpz_t(), denominator.get_mpz_t(), w.get_den().get_mpz_t());
  std::vector<mpz_class> scaled;
  mpz_class total = 0;
  for (const auto& w : weight) {
    scaled.push_back(w.get_num() * (denominator / w.get_den()));
    total += abs(scaled.back());
  }
  const bool small = total < mpz_class(static_cast<long>(LLONG_MAX / 4));
  std::vector<long long> scaled_small;
  if (small) {
    for (const auto& s : scaled) scaled_small.push_back(s.get_si());
  }

  std::vector<std::vector<std::uint32_t>> options;
  for (Item j = 0; j < n; ++j) options.push_back(monotone_tables(n, j));
  std::vector<std::size_t> choice(static_cast<std::size_t>(n), 0);
  std::vector<std::uint32_t> tables(static_cast<std::size_t>(n));
  std::vector<std::uint32_t> best_tables;
  mpz_class best_value;
  int best_ones = 0;
  std::vector<int> stack;
  for (;;) {
    int ones = 0;
    for (std::size_t j = 0; j < tables.size(); ++j) {
      tables[j] = options[j][choice[j]];
      ones += std::popcount(tables[j]);
    }
    mpz_class value = small ? mpz_class(static_cast<long>(evaluate(nodes, scaled_small, tables, stack)))
                            : evaluate(nodes, scaled, tables, stack);
    bool better = best_tables.empty() || value > best_value ||
                  (value == best_value && (ones < best_ones || (ones == best_ones && tables < best_tables)));
    if (better) {
      best_tables = tables;
      best_value = value;
      best_ones = ones;
    }
    std::size_t pos = 0;
    while (pos < choice.size() && ++choice[pos] == options[pos].size()) choice[pos++] = 0;
    if (pos == choice.size()) break;
  }
  std::vector<std::vector<ItemSet>> minimal(static_cast<std::size_t>(n));
  for (Item j = 0; j < n; ++j) {
    const std::uint32_t t = best_tables[as_index(j)];
    for (std::uint32_t h = 0; h < (std::uint32_t{1} << n); ++h) {
      if (t >> h & 1U) minimal[as_index(j)].push_back(ItemSet(h));
    }
  }
  PolicyOptimum out{MonotoneStoppingPolicy::from_minimal_sets(n, std::move(minimal)), Rational(best_value, denominator)};
  out.value.canonicalize();
  if (out.value != policy_revenue(inst, out.policy)) {
    throw InternalInconsistency("brute-force policy value disagrees with direct evaluation");
  }
  return out;
}

MarkovStoppingResult markov_stopping_assortment(const MarkovChainParams& chain, const std::vector<Rational>& prices) {
  const std::size_t n = chain.arrival.size();
  if (prices.size() != n) throw InvalidInput("need one price per chain state");
  // Validates the chain, including absorption.
  (void)gen_markov_chain(chain);
  std::vector<bool> stop(n, true);
  std::vector<Rational> value(n);
  std::vector<Rational> continuation(n);
  const std::size_t iteration_cap = (std::size_t{1} << std::min<std::size_t>(n, 20)) + 2;
  for (std::size_t iter = 0;; ++iter) {
    if (iter > iteration_cap) throw InternalInconsistency("policy iteration failed to converge");
    std::vector<std::size_t> moving;
    for (std::size_t j = 0; j < n; ++j) {
      if (!stop[j]) moving.push_back(j);
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (stop[j]) value[j] = prices[j];
    }
    if (!moving.empty()) {
      const std::size_t k = moving.size();
      detail::Matrix a(k, std::vector<Rational>(k));
      detail::Matrix b(k, std::vector<Rational>(1));
      for (std::size_t r = 0; r < k; ++r) {
        const auto& row = chain.transition[moving[r]];
        for (std::size_t c = 0; c < k; ++c) a[r][c] = (r == c ? Rational(1) : Rational(0)) - row[moving[c]];
        for (std::size_t j = 0; j < n; ++j) {
          if (stop[j]) b[r][0] += row[j] * prices[j];
        }
      }
      auto x = detail::solve_linear(std::move(a), std::move(b));
      if (!x) throw InternalInconsistency("continuation system is singular for an absorbing chain");
      for (std::size_t r = 0; r < k; ++r) value[moving[r]] = (*x)[r][0];
    }
    for (std::size_t j = 0; j < n; ++j) {
      continuation[j] = 0;
      for (std::size_t k = 0; k < n; ++k) continuation[j] += chain.transition[j][k] * value[k];
    }
    bool changed = false;
    for (std::size_t j = 0; j < n; ++j) {
      bool want = prices[j] > continuation[j] || (prices[j] == continuation[j] && stop[j]);
      if (want != stop[j]) {
        stop[j] = want;
        changed = true;
      }
    }
    if (!changed) break;
  }
  MarkovStoppingResult out;
  out.values = value;
  out.revenue = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (prices[j] > 0 && prices[j] >= continuation[j]) out.stop_set.insert(static_cast<Item>(j));
    out.revenue += chain.arrival[j] * value[j];
  }
  return out;
}

FutureChoices::FutureChoices(const ListDistribution& dist) : tree_(dist) {}

const std::vector<Rational>& FutureChoices::table(int node_id) {
  auto it = tables_.find(node_id);
  if (it != tables_.end()) return it->second;
  const int n = tree_.item_count();
  const std::size_t n_items = static_cast<std::size_t>(n);
  const auto& node = tree_.node(node_id);
  const std::uint32_t used = to_set(node.prefix).mask();
  const std::uint32_t count = std::uint32_t{1} << n;
  std::vector<Rational> t(static_cast<std::size_t>(count) * n_items);
  for (int child : node.children) {
    const auto& c = tree_.node(child);
    const Item e = endpoint(c.prefix);
    const std::vector<Rational>* below = nullptr;
    for (std::uint32_t s = 0; s < count; ++s) {
      if (s & used) continue;
      ItemSet set(s);
      if (set.contains(e)) {
        t[s * n_items + as_index(e)] += c.q;
        continue;
      }
      if (!below) below = &table(child);
      for (Item j : set.items()) {
        const Rational& p = (*below)[s * n_items + as_index(j)];
        if (p != 0) t[s * n_items + as_index(j)] += c.q * p;
      }
    }
  }
  return tables_.emplace(node_id, std::move(t)).first->second;
}

const Rational& FutureChoices::prob(int node, ItemSet assortment, Item j) {
  if (assortment.intersects(to_set(tree_.node(node).prefix))) {
    throw InvalidInput("assortment intersects the conditioning prefix");
  }
  if (!assortment.contains(j)) throw InvalidInput("item is not in the assortment");
  return table(node)[assortment.mask() * static_cast<std::size_t>(tree_.item_count()) + as_index(j)];
}

Rational s_adjusted_price(const Instance& inst, ItemSet assortment, const Prefix& rho) {
  if (rho.empty()) throw InvalidInput("adjusted prices are defined for nonempty prefixes");
  if (assortment.intersects(to_set(rho))) throw InvalidInput("prefix must avoid the assortment");
  Rational price = inst.price(endpoint(rho));
  for (Item j : assortment.items()) price -= inst.price(j) * choice_probability(inst, assortment, j, rho);
  return price;
}

AdjustedRevenueCheck adjusted_revenue_identity(const Instance& inst, ItemSet assortment, const StoppingRule& rule) {
  TreeDiagram tree(inst.dist);
  AdjustedRevenueCheck out;
  out.revenue_gap = stopping_rule_revenue(inst, rule) - assortment_revenue(inst, assortment);
  out.adjusted_revenue = 0;
  FutureChoices futures(inst.dist);
  // Walk the runs of the rule along prefixes that avoid S.
  std::vector<int> stack{0};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    for (int child : tree.node(id).children) {
      const auto& node = tree.node(child);
      Item e = endpoint(node.prefix);
      bool stops = rule(e, to_set(node.prefix).without(e));
      if (assortment.contains(e)) {
        if (!stops) {
          throw InvalidInput("the stopping rule must stop on every item of the assortment");
        }
        continue;
      }
      if (!stops) {
        stack.push_back(child);
        continue;
      }
      Rational adjusted = inst.price(e);
      for (Item j : assortment.items()) adjusted -= inst.price(j) * futures.prob(child, assortment, j);
      out.adjusted_revenue += adjusted * node.prob;
    }
  }
  if (out.revenue_gap != out.adjusted_revenue) {
    throw InternalInconsistency("adjusted revenue " + to_string(out.adjusted_revenue) + " differs from revenue gap " +
                                to_string(out.revenue_gap));
  }
  return out;
}

namespace {

std::vector<ItemSet> subsets_in_lex_order(ItemSet ground) {
  std::vector<ItemSet> out;
  const std::uint32_t g = ground.mask();
  // Enumerate submasks of the ground set.
  for (std::uint32_t s = g;; s = (s - 1) & g) {
    if (s != 0) out.push_back(ItemSet(s));
    if (s == 0) break;
  }
  std::sort(out.begin(), out.end(), [](ItemSet a, ItemSet b) { return lex_less(a, b); });
  return out;
}

bool at_least(const Rational& a, const Rational& b, const std::optional<Rational>& tolerance) {
  return tolerance ? a >= b - *tolerance : a >= b;
}

DominationResult dominate(FutureChoices& futures, int rho, int rho_prime, const std::optional<Rational>& tolerance) {
  const auto& tree = futures.tree();
  ItemSet used = to_set(tree.node(rho).prefix) | to_set(tree.node(rho_prime).prefix);
  ItemSet free = ItemSet::full(tree.item_count()) - used;
  DominationResult out;
  for (ItemSet s : subsets_in_lex_order(free)) {
    for (Item j : s.items()) {
      if (!at_least(futures.prob(rho, s, j), futures.prob(rho_prime, s, j), tolerance)) {
        out.holds = false;
        out.assortment = s;
        out.item = j;
        return out;
      }
    }
  }
  return out;
}

int realizable_node(const TreeDiagram& tree, const Prefix& p) {
  auto id = tree.find(p);
  if (!id || tree.node(*id).prob == 0) throw InvalidInput("prefix is not realizable");
  return *id;
}

std::vector<int> ordered_prefixes(const TreeDiagram& tree) {
  auto ids = tree.realizable_prefixes();
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    const auto& pa = tree.node(a).prefix;
    const auto& pb = tree.node(b).prefix;
    if (pa.size() != pb.size()) return pa.size() < pb.size();
    return pa < pb;
  });
  return ids;
}

}  // namespace

DominationResult check_domination(const ListDistribution& dist, const Prefix& rho, const Prefix& rho_prime,
                                  const std::optional<Rational>& tolerance) {
  FutureChoices futures(dist);
  int a = realizable_node(futures.tree(), rho);
  int b = realizable_node(futures.tree(), rho_prime);
  return dominate(futures, a, b, tolerance);
}

HistoryMonotoneResult check_history_monotone(const ListDistribution& dist, const std::optional<Rational>& tolerance) {
  FutureChoices futures(dist);
  const auto& tree = futures.tree();
  auto ids = ordered_prefixes(tree);
  HistoryMonotoneResult out;
  for (int a : ids) {
    const auto& pa = tree.node(a).prefix;
    ItemSet body_a = to_set(pa).without(endpoint(pa));
    for (int b : ids) {
      if (a == b) continue;
      const auto& pb = tree.node(b).prefix;
      if (endpoint(pa) != endpoint(pb)) continue;
      ItemSet body_b = to_set(pb).without(endpoint(pb));
      if (body_a.subset_of(body_b)) continue;
      auto d = dominate(futures, a, b, tolerance);
      if (!d.holds) {
        out.holds = false;
        out.witness = HistoryMonotoneWitness{pa, pb, *d.assortment, *d.item};
        return out;
      }
    }
  }
  return out;
}

std::vector<Tier> tier_decomposition(const Instance& inst, ItemSet assortment, Item j,
                                     const std::optional<Rational>& tolerance) {
  const int n = inst.item_count();
  if (assortment.contains(j)) throw InvalidInput("the endpoint item must lie outside the assortment");
  if (assortment == ItemSet::full(n)) throw InvalidInput("the assortment must be a proper subset of the items");
  auto hm = check_history_monotone(inst.dist, tolerance);
  if (!hm.holds) throw InvalidInput("tier decomposition requires history-monotone futures");

  FutureChoices futures(inst.dist);
  const auto& tree = futures.tree();
  std::vector<int> vertices;
  for (int id : ordered_prefixes(tree)) {
    const auto& p = tree.node(id).prefix;
    if (endpoint(p) == j && !to_set(p).intersects(assortment)) vertices.push_back(id);
  }
  const std::size_t v = vertices.size();
  auto set_of = [&](std::size_t a) { return to_set(tree.node(vertices[a]).prefix); };
  auto comparable = [&](std::size_t a, std::size_t b) {
    return set_of(a).subset_of(set_of(b)) || set_of(b).subset_of(set_of(a));
  };
  // Connected components of the incomparability graph.
  std::vector<std::size_t> component(v);
  std::iota(component.begin(), component.end(), 0);
  std::function<std::size_t(std::size_t)> root = [&](std::size_t a) {
    return component[a] == a ? a : component[a] = root(component[a]);
  };
  for (std::size_t a = 0; a < v; ++a) {
    for (std::size_t b = a + 1; b < v; ++b) {
      if (!comparable(a, b)) component[root(a)] = root(b);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t a = 0; a < v; ++a) groups[root(a)].push_back(a);

  // Multi-vertex components are tiers of their own; isolated vertices with
  // equal sets share a tier.
  std::vector<std::pair<TierKind, std::vector<std::size_t>>> raw;
  std::map<std::uint32_t, std::size_t> same_set;
  for (auto& [r, members] : groups) {
    if (members.size() > 1) {
      raw.push_back({TierKind::Incomparable, members});
      continue;
    }
    std::uint32_t key = set_of(members[0]).mask();
    auto it = same_set.find(key);
    if (it == same_set.end()) {
      same_set[key] = raw.size();
      raw.push_back({TierKind::SameSet, members});
    } else {
      raw[it->second].second.push_back(members[0]);
    }
  }
  auto min_size = [&](const std::vector<std::size_t>& members) {
    int m = INT_MAX;
    for (auto a : members) m = std::min(m, set_of(a).size());
    return m;
  };
  std::sort(raw.begin(), raw.end(), [&](const auto& x, const auto& y) { return min_size(x.second) < min_size(y.second); });

  auto equal_futures = [&](std::size_t a, std::size_t b) {
    for (Item k : assortment.items()) {
      const Rational& pa = futures.prob(vertices[a], assortment, k);
      const Rational& pb = futures.prob(vertices[b], assortment, k);
      if (tolerance ? abs(pa - pb) > *tolerance : pa != pb) return false;
    }
    return true;
  };
  auto adjusted = [&](std::size_t a) {
    Rational price = inst.price(j);
    for (Item k : assortment.items()) price -= inst.price(k) * futures.prob(vertices[a], assortment, k);
    return price;
  };
  auto fail = [](const std::string& what) { throw InternalInconsistency("tier decomposition: " + what); };
  for (std::size_t t = 0; t < raw.size(); ++t) {
    const auto& members = raw[t].second;
    for (std::size_t x = 0; x < members.size(); ++x) {
      for (std::size_t y = x + 1; y < members.size(); ++y) {
        if (raw[t].first == TierKind::SameSet && set_of(members[x]) != set_of(members[y])) fail("tier mixes sets");
        if (raw[t].first == TierKind::Incomparable && !equal_futures(members[x], members[y])) {
          fail("connected prefixes have different futures");
        }
        if (set_of(members[x]) != set_of(members[y])) {
          Rational ax = adjusted(members[x]);
          Rational ay = adjusted(members[y]);
          if (tolerance ? abs(ax - ay) > *tolerance : ax != ay) fail("adjusted prices differ within a tier");
        }
      }
    }
    for (std::size_t u = 0; u < t; ++u) {
      for (auto hi : members) {
        for (auto lo : raw[u].second) {
          if (!set_of(lo).subset_of(set_of(hi)) || set_of(lo) == set_of(hi)) fail("tiers are not nested");
          for (Item k : assortment.items()) {
            if (!at_least(futures.prob(vertices[hi], assortment, k), futures.prob(vertices[lo], assortment, k),
                          tolerance)) {
              fail("later tier has a weaker future");
            }
          }
          Rational later = adjusted(hi);
          Rational earlier = adjusted(lo);
          if (tolerance ? later > earlier + *tolerance : later > earlier) fail("adjusted prices increase across tiers");
        }
      }
    }
  }
  std::vector<Tier> out;
  for (auto& [kind, members] : raw) {
    Tier tier{kind, {}};
    for (auto a : members) tier.prefixes.push_back(tree.node(vertices[a]).prefix);
    std::sort(tier.prefixes.begin(), tier.prefixes.end());
    out.push_back(std::move(tier));
  }
  return out;
}

}  // namespace fixedprice
