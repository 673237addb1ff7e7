#include "fixedprice/mechanism.hpp"

#include "fixedprice/errors.hpp"
#include "fixedprice/tree_diagram.hpp"

namespace fixedprice {

namespace {

std::size_t as_index(Item j) { return static_cast<std::size_t>(j); }

// Allocation of list i spread over items, zero off the list.
std::vector<Rational> by_item(const Instance& inst, const Mechanism& m, std::size_t i) {
  std::vector<Rational> out(as_index(inst.item_count()), Rational(0));
  const auto& list = inst.dist.entries[i].list;
  for (std::size_t k = 0; k < list.size(); ++k) out[as_index(list[k])] = m.alloc[i][k];
  return out;
}

void check_shape(const Instance& inst, const Mechanism& m) {
  if (m.alloc.size() != inst.dist.entries.size()) {
    throw InvalidInput("mechanism covers " + std::to_string(m.alloc.size()) + " lists, instance has " +
                       std::to_string(inst.dist.entries.size()));
  }
  for (std::size_t i = 0; i < m.alloc.size(); ++i) {
    if (m.alloc[i].size() != inst.dist.entries[i].list.size()) {
      throw InvalidInput("mechanism entry for list " + format_list(inst, inst.dist.entries[i].list) +
                         " has the wrong length");
    }
  }
}

std::string var_name(const Instance& inst, const RankedList& list, Item j) {
  return "x[" + inst.item_ids[as_index(j)] + "|" + format_list(inst, list) + "]";
}

}  // namespace

Mechanism zero_mechanism(const Instance& inst) {
  Mechanism m;
  for (const auto& e : inst.dist.entries) m.alloc.emplace_back(e.list.size(), Rational(0));
  return m;
}

Rational mechanism_revenue(const Instance& inst, const Mechanism& m) {
  check_shape(inst, m);
  Rational revenue = 0;
  for (std::size_t i = 0; i < m.alloc.size(); ++i) {
    const auto& e = inst.dist.entries[i];
    Rational r = 0;
    for (std::size_t k = 0; k < e.list.size(); ++k) r += inst.price(e.list[k]) * m.alloc[i][k];
    revenue += e.prob * r;
  }
  return revenue;
}

Rational set_function_revenue(const Instance& inst, const SetFunction& f) {
  TreeDiagram tree(inst.dist);
  Rational revenue = 0;
  for (int id : tree.realizable_prefixes()) {
    const auto& node = tree.node(id);
    ItemSet here = to_set(node.prefix);
    ItemSet before = here.without(endpoint(node.prefix));
    revenue += inst.price(endpoint(node.prefix)) * (f[here] - f[before]) * node.prob;
  }
  return revenue;
}

MechanismLP build_mechanism_lp(const Instance& inst) {
  MechanismLP out;
  const auto& entries = inst.dist.entries;
  out.var_of.resize(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (Item j : entries[i].list) {
      int v = out.lp.add_variable(var_name(inst, entries[i].list, j));
      out.lp.set_objective(v, entries[i].prob * inst.price(j));
      out.var_of[i].push_back(v);
    }
  }
  // Position of each item on each list, or -1.
  std::vector<std::vector<int>> position(entries.size(), std::vector<int>(as_index(inst.item_count()), -1));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t k = 0; k < entries[i].list.size(); ++k) position[i][as_index(entries[i].list[k])] = static_cast<int>(k);
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& list = entries[i].list;
    LpRow sum{"sum" + format_list(inst, list), {}, Relation::LessEqual, Rational(1), false};
    for (int v : out.var_of[i]) sum.terms.push_back({v, Rational(1)});
    out.lp.add_row(std::move(sum));
    for (std::size_t depth = 1; depth <= list.size(); ++depth) {
      for (std::size_t other = 0; other < entries.size(); ++other) {
        LpRow row;
        row.name = "ic" + format_list(inst, list) + "/" + std::to_string(depth) + "/" + format_list(inst, entries[other].list);
        row.relation = Relation::GreaterEqual;
        row.rhs = 0;
        row.lazy = true;
        for (std::size_t k = 0; k < depth; ++k) {
          row.terms.push_back({out.var_of[i][k], Rational(1)});
          int pos = position[other][as_index(list[k])];
          if (pos >= 0) row.terms.push_back({out.var_of[other][static_cast<std::size_t>(pos)], Rational(-1)});
        }
        out.lp.add_row(std::move(row));
      }
    }
  }
  return out;
}

Mechanism mechanism_from_values(const MechanismLP& mlp, const std::vector<Rational>& values) {
  Mechanism m;
  for (const auto& vars : mlp.var_of) {
    std::vector<Rational> row;
    for (int v : vars) row.push_back(values.at(static_cast<std::size_t>(v)));
    m.alloc.push_back(std::move(row));
  }
  return m;
}

MechanismOptimum solve_mechanism_lp(const Instance& inst) {
  auto mlp = build_mechanism_lp(inst);
  MechanismOptimum out;
  out.solution = solve_lp(mlp.lp);
  if (out.solution.status != LpStatus::Optimal) {
    throw InternalInconsistency("mechanism LP is " + to_string(out.solution.status));
  }
  out.mechanism = mechanism_from_values(mlp, out.solution.values);
  return out;
}

IcReport verify_ic(const Instance& inst, const Mechanism& m) {
  check_shape(inst, m);
  IcReport report;
  const auto& entries = inst.dist.entries;
  std::vector<std::vector<Rational>> spread;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    spread.push_back(by_item(inst, m, i));
    Rational sum = 0;
    for (std::size_t k = 0; k < m.alloc[i].size(); ++k) {
      if (m.alloc[i][k] < 0) {
        report.feasibility_problems.push_back("negative allocation of " + inst.item_ids[as_index(entries[i].list[k])] +
                                              " to list " + format_list(inst, entries[i].list));
      }
      sum += m.alloc[i][k];
    }
    if (sum > 1) {
      report.feasibility_problems.push_back("list " + format_list(inst, entries[i].list) + " allocates " +
                                            to_string(sum) + " > 1");
    }
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& list = entries[i].list;
    Rational truthful = 0;
    std::vector<Rational> deviation(entries.size(), Rational(0));
    for (std::size_t depth = 1; depth <= list.size(); ++depth) {
      Item j = list[depth - 1];
      truthful += m.alloc[i][depth - 1];
      for (std::size_t other = 0; other < entries.size(); ++other) {
        deviation[other] += spread[other][as_index(j)];
        if (deviation[other] > truthful) {
          report.violations.push_back({i, depth, other, deviation[other] - truthful});
        }
      }
    }
  }
  return report;
}

Mechanism assortment_to_mechanism(const Instance& inst, ItemSet assortment) {
  Mechanism m = zero_mechanism(inst);
  for (std::size_t i = 0; i < inst.dist.entries.size(); ++i) {
    const auto& list = inst.dist.entries[i].list;
    for (std::size_t k = 0; k < list.size(); ++k) {
      if (assortment.contains(list[k])) {
        m.alloc[i][k] = 1;
        break;
      }
    }
  }
  return m;
}

namespace {

void check_set_function_size(int n) {
  if (n > kMaxSetFunctionItems) {
    throw CapExceeded("set functions over " + std::to_string(n) + " items exceed the cap of " +
                      std::to_string(kMaxSetFunctionItems));
  }
}

}  // namespace

SetFunction mechanism_to_set_function(const Instance& inst, const Mechanism& m) {
  check_shape(inst, m);
  const int n = inst.item_count();
  check_set_function_size(n);
  SetFunction f(n);
  const std::size_t count = std::size_t{1} << n;
  std::vector<Rational> mass(count);
  for (std::size_t i = 0; i < inst.dist.entries.size(); ++i) {
    auto spread = by_item(inst, m, i);
    mass[0] = 0;
    for (std::size_t s = 1; s < count; ++s) {
      std::size_t low = s & (~s + 1);
      mass[s] = mass[s ^ low] + spread[static_cast<std::size_t>(std::countr_zero(low))];
      if (mass[s] > f.values[s]) f.values[s] = mass[s];
    }
  }
  for (std::size_t i = 0; i < inst.dist.entries.size(); ++i) {
    const auto& list = inst.dist.entries[i].list;
    ItemSet prefix;
    for (std::size_t k = 0; k < list.size(); ++k) {
      ItemSet before = prefix;
      prefix.insert(list[k]);
      if (m.alloc[i][k] != f[prefix] - f[before]) {
        throw InvalidInput("allocation of " + inst.item_ids[as_index(list[k])] + " to list " + format_list(inst, list) +
                           " is not the marginal value of its set function; the mechanism is not incentive compatible");
      }
    }
  }
  if (set_function_revenue(inst, f) != mechanism_revenue(inst, m)) {
    throw InvalidInput("set function revenue differs from mechanism revenue");
  }
  return f;
}

std::optional<SubmodularityWitness> find_submodularity_violation(const SetFunction& f) {
  const int n = f.item_count;
  const std::uint32_t count = std::uint32_t{1} << n;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    ItemSet s(mask);
    for (Item j = 0; j < n; ++j) {
      if (s.contains(j)) continue;
      Rational gain = f[s.with(j)] - f[s];
      for (Item k = 0; k < n; ++k) {
        if (k == j || s.contains(k)) continue;
        if (gain < f[s.with(j).with(k)] - f[s.with(k)]) return SubmodularityWitness{s, j, k};
      }
    }
  }
  return std::nullopt;
}

std::optional<std::pair<ItemSet, Item>> find_monotonicity_violation(const SetFunction& f) {
  const int n = f.item_count;
  const std::uint32_t count = std::uint32_t{1} << n;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    ItemSet s(mask);
    for (Item j = 0; j < n; ++j) {
      if (!s.contains(j) && f[s.with(j)] < f[s]) return std::make_pair(s, j);
    }
  }
  return std::nullopt;
}

Mechanism submodular_to_mechanism(const Instance& inst, const SetFunction& f) {
  if (f.item_count != inst.item_count()) throw InvalidInput("set function and instance disagree on the item count");
  if (f[ItemSet()] != 0) throw InvalidInput("set function must vanish on the empty set");
  for (std::size_t s = 0; s < f.values.size(); ++s) {
    if (f.values[s] < 0 || f.values[s] > 1) {
      throw InvalidInput("set function value " + to_string(f.values[s]) + " on " +
                         format_set(inst, ItemSet(static_cast<std::uint32_t>(s))) + " outside [0,1]");
    }
  }
  if (auto v = find_monotonicity_violation(f)) {
    throw InvalidInput("set function decreases when " + inst.item_ids[as_index(v->second)] + " is added to " +
                       format_set(inst, v->first));
  }
  if (auto w = find_submodularity_violation(f)) {
    throw InvalidInput("set function is not submodular at S=" + format_set(inst, w->base) + ", j=" +
                       inst.item_ids[as_index(w->first)] + ", j'=" + inst.item_ids[as_index(w->second)]);
  }
  Mechanism m = zero_mechanism(inst);
  for (std::size_t i = 0; i < inst.dist.entries.size(); ++i) {
    const auto& list = inst.dist.entries[i].list;
    ItemSet prefix;
    for (std::size_t k = 0; k < list.size(); ++k) {
      ItemSet before = prefix;
      prefix.insert(list[k]);
      m.alloc[i][k] = f[prefix] - f[before];
    }
  }
  return m;
}

RationalLP build_set_function_lp(const Instance& inst) {
  const int n = inst.item_count();
  if (n > kMaxSetFunctionLpItems) {
    throw CapExceeded("set-function LP over " + std::to_string(n) + " items exceeds the cap of " +
                      std::to_string(kMaxSetFunctionLpItems));
  }
  RationalLP lp;
  const std::uint32_t count = std::uint32_t{1} << n;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    ItemSet s(mask);
    lp.add_variable("f" + format_set(inst, s), Rational(0), Rational(mask == 0 ? 0 : 1));
  }
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    ItemSet s(mask);
    for (Item j = 0; j < n; ++j) {
      if (s.contains(j)) continue;
      lp.add_row({"mono" + format_set(inst, s) + "+" + inst.item_ids[as_index(j)],
                  {{static_cast<int>(mask), Rational(1)}, {static_cast<int>(s.with(j).mask()), Rational(-1)}},
                  Relation::LessEqual,
                  Rational(0)});
    }
  }
  TreeDiagram tree(inst.dist);
  for (int id : tree.realizable_prefixes()) {
    const auto& node = tree.node(id);
    Rational w = inst.price(endpoint(node.prefix)) * node.prob;
    ItemSet here = to_set(node.prefix);
    lp.add_objective(static_cast<int>(here.mask()), w);
    lp.add_objective(static_cast<int>(here.without(endpoint(node.prefix)).mask()), -w);
  }
  return lp;
}

SetFunctionOptimum solve_set_function_lp(const Instance& inst) {
  SetFunctionOptimum out;
  out.solution = solve_lp(build_set_function_lp(inst));
  if (out.solution.status != LpStatus::Optimal) {
    throw InternalInconsistency("set-function LP is " + to_string(out.solution.status));
  }
  out.f = SetFunction(inst.item_count());
  out.f.values = out.solution.values;
  return out;
}

BmLP build_bm_lp(const Instance& inst) {
  BmLP out;
  const auto& entries = inst.dist.entries;
  out.var_of.resize(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (Item j : entries[i].list) {
      int v = out.lp.add_variable(var_name(inst, entries[i].list, j));
      out.lp.set_objective(v, entries[i].prob * inst.price(j));
      out.var_of[i].push_back(v);
    }
  }
  for (Item j = 0; j < inst.item_count(); ++j) out.z_var.push_back(out.lp.add_variable("z[" + inst.item_ids[as_index(j)] + "]"));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& list = entries[i].list;
    const std::string tag = format_list(inst, list);
    LpRow sum{"sum" + tag, {}, Relation::LessEqual, Rational(1)};
    for (std::size_t k = 0; k < list.size(); ++k) {
      const int x = out.var_of[i][k];
      const int z = out.z_var[as_index(list[k])];
      sum.terms.push_back({x, Rational(1)});
      out.lp.add_row({"incl" + tag + "/" + std::to_string(k + 1), {{x, Rational(1)}, {z, Rational(-1)}},
                      Relation::LessEqual, Rational(0)});
      LpRow later{"after" + tag + "/" + std::to_string(k + 1), {{z, Rational(1)}}, Relation::LessEqual, Rational(1)};
      for (std::size_t kk = k + 1; kk < list.size(); ++kk) later.terms.push_back({out.var_of[i][kk], Rational(1)});
      out.lp.add_row(std::move(later));
    }
    out.lp.add_row(std::move(sum));
  }
  return out;
}

LpSolution solve_bm_lp(const Instance& inst) {
  auto bm = build_bm_lp(inst);
  auto sol = solve_lp(bm.lp);
  if (sol.status != LpStatus::Optimal) throw InternalInconsistency("relaxation LP is " + to_string(sol.status));
  return sol;
}

ContainmentWitness containment_witness(const Instance& inst, const Mechanism& m) {
  check_shape(inst, m);
  ContainmentWitness w;
  w.inclusion.assign(as_index(inst.item_count()), Rational(0));
  const auto& entries = inst.dist.entries;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t k = 0; k < entries[i].list.size(); ++k) {
      auto& z = w.inclusion[as_index(entries[i].list[k])];
      if (m.alloc[i][k] > z) z = m.alloc[i][k];
    }
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& list = entries[i].list;
    const std::string tag = format_list(inst, list);
    Rational total = 0;
    for (std::size_t k = 0; k < list.size(); ++k) {
      const Rational& x = m.alloc[i][k];
      const Rational& z = w.inclusion[as_index(list[k])];
      total += x;
      if (x < 0) w.violations.push_back("negative allocation on " + tag);
      if (x > z) w.violations.push_back("allocation above inclusion on " + tag);
      Rational after = 0;
      for (std::size_t kk = k + 1; kk < list.size(); ++kk) after += m.alloc[i][kk];
      if (after + z > 1) {
        w.violations.push_back("items after position " + std::to_string(k + 1) + " on " + tag + " receive " +
                               to_string(after) + " > 1 - " + to_string(z));
      }
    }
    if (total > 1) w.violations.push_back("list " + tag + " allocates more than 1");
  }
  return w;
}

Json mechanism_to_json(const Instance& inst, const Mechanism& m) {
  check_shape(inst, m);
  Json alloc = Json::array();
  for (std::size_t i = 0; i < m.alloc.size(); ++i) {
    const auto& list = inst.dist.entries[i].list;
    Json ids = Json::array();
    Json probs = Json::object();
    for (std::size_t k = 0; k < list.size(); ++k) {
      ids.push_back(inst.item_ids[as_index(list[k])]);
      probs[inst.item_ids[as_index(list[k])]] = rational_to_json(m.alloc[i][k]);
    }
    alloc.push_back(Json{{"list", ids}, {"probs", probs}});
  }
  return Json{{"alloc", alloc}};
}

Mechanism mechanism_from_json(const Instance& inst, const Json& doc) {
  if (!doc.is_object() || !doc.contains("alloc") || !doc["alloc"].is_array()) {
    throw InvalidInput("mechanism: expected {\"alloc\":[...]}");
  }
  Mechanism m = zero_mechanism(inst);
  const auto& alloc = doc["alloc"];
  for (std::size_t a = 0; a < alloc.size(); ++a) {
    const std::string where = "/alloc/" + std::to_string(a);
    const Json& entry = alloc[a];
    if (!entry.contains("list") || !entry["list"].is_array()) throw InvalidInput(where + ": missing list");
    RankedList list;
    for (const auto& id : entry["list"]) {
      if (!id.is_string()) throw InvalidInput(where + ": item ids must be strings");
      list.push_back(inst.item(id.get<std::string>()));
    }
    auto idx = inst.dist.find(list);
    if (!idx) throw InvalidInput(where + ": list " + format_list(inst, list) + " is not in the support");
    if (entry.contains("probs")) {
      if (!entry["probs"].is_object()) throw InvalidInput(where + "/probs: expected an object");
      for (const auto& [id, value] : entry["probs"].items()) {
        Item j = inst.item(id);
        std::size_t k = 0;
        while (k < list.size() && list[k] != j) ++k;
        if (k == list.size()) throw InvalidInput(where + ": item " + id + " is not on the list");
        m.alloc[*idx][k] = rational_from_json(value, where + "/probs/" + id);
      }
    }
  }
  return m;
}

}  // namespace fixedprice
