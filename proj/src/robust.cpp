#include "fixedprice/robust.hpp"

#include <algorithm>

#include "fixedprice/errors.hpp"

namespace fixedprice {

namespace {

std::size_t as_index(Item j) { return static_cast<std::size_t>(j); }

bool is_zero_entry(const MenuEntry& e) { return e.none == 1; }

}  // namespace

void validate_menu(const Menu& menu, int item_count) {
  bool has_zero = false;
  for (std::size_t e = 0; e < menu.entries.size(); ++e) {
    const auto& entry = menu.entries[e];
    if (entry.items.size() != static_cast<std::size_t>(item_count)) {
      throw InvalidInput("menu entry " + std::to_string(e) + " has the wrong number of items");
    }
    Rational sum = entry.none;
    if (entry.none < 0) throw InvalidInput("menu entry " + std::to_string(e) + " has a negative probability");
    for (const auto& x : entry.items) {
      if (x < 0) throw InvalidInput("menu entry " + std::to_string(e) + " has a negative probability");
      sum += x;
    }
    if (sum != 1) throw InvalidInput("menu entry " + std::to_string(e) + " sums to " + to_string(sum) + " ≠ 1");
    has_zero = has_zero || is_zero_entry(entry);
  }
  if (!has_zero) throw InvalidInput("menu must contain the no-purchase entry");
}

Menu mechanism_to_menu(const Instance& inst, const Mechanism& m) {
  if (m.alloc.size() != inst.dist.entries.size()) throw InvalidInput("mechanism does not match the instance");
  Menu menu;
  auto add = [&](MenuEntry e) {
    if (std::find(menu.entries.begin(), menu.entries.end(), e) == menu.entries.end()) menu.entries.push_back(std::move(e));
  };
  for (std::size_t i = 0; i < m.alloc.size(); ++i) {
    MenuEntry e{Rational(1), std::vector<Rational>(as_index(inst.item_count()), Rational(0))};
    const auto& list = inst.dist.entries[i].list;
    for (std::size_t k = 0; k < list.size(); ++k) {
      e.items[as_index(list[k])] = m.alloc[i][k];
      e.none -= m.alloc[i][k];
    }
    add(std::move(e));
  }
  add(MenuEntry{Rational(1), std::vector<Rational>(as_index(inst.item_count()), Rational(0))});
  validate_menu(menu, inst.item_count());
  return menu;
}

std::vector<std::size_t> exposable_entries(const Instance& inst, const Menu& menu, const RankedList& list) {
  const int n = inst.item_count();
  validate_menu(menu, n);
  const Rational bound = 1 + n;
  std::vector<std::size_t> out;
  for (std::size_t target = 0; target < menu.entries.size(); ++target) {
    RationalLP lp;
    // Variable 0 is the utility of no purchase, 1..n of the items.
    const int none = lp.add_variable("u0", Rational(-bound), bound);
    std::vector<int> u;
    for (Item j = 0; j < n; ++j) u.push_back(lp.add_variable("u[" + inst.item_ids[as_index(j)] + "]", Rational(-bound), bound));
    const int margin = lp.add_variable("eps", Rational(0), Rational(1));
    lp.set_objective(margin, 1);
    auto above = [&](int hi, int lo, const std::string& name) {
      lp.add_row({name, {{hi, Rational(1)}, {lo, Rational(-1)}, {margin, Rational(-1)}}, Relation::GreaterEqual, Rational(0)});
    };
    for (std::size_t k = 0; k + 1 < list.size(); ++k) {
      above(u[as_index(list[k])], u[as_index(list[k + 1])], "order" + std::to_string(k + 1));
    }
    if (!list.empty()) above(u[as_index(list.back())], none, "last-over-none");
    ItemSet on_list = to_set(list);
    for (Item j = 0; j < n; ++j) {
      if (!on_list.contains(j)) above(none, u[as_index(j)], "none-over-" + inst.item_ids[as_index(j)]);
    }
    const auto& x = menu.entries[target];
    for (std::size_t other = 0; other < menu.entries.size(); ++other) {
      if (other == target) continue;
      const auto& y = menu.entries[other];
      LpRow row{"beats" + std::to_string(other), {{none, x.none - y.none}}, Relation::GreaterEqual, Rational(0)};
      for (Item j = 0; j < n; ++j) row.terms.push_back({u[as_index(j)], x.items[as_index(j)] - y.items[as_index(j)]});
      lp.add_row(std::move(row));
    }
    auto sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) throw InternalInconsistency("exposure LP is " + to_string(sol.status));
    if (sol.value > 0) out.push_back(target);
  }
  if (out.empty()) throw InternalInconsistency("no menu entry is exposable");
  return out;
}

Rational robust_revenue(const Instance& inst, const Menu& menu) {
  Rational revenue = 0;
  for (const auto& e : inst.dist.entries) {
    std::optional<Rational> worst;
    for (std::size_t idx : exposable_entries(inst, menu, e.list)) {
      Rational r = 0;
      for (Item j = 0; j < inst.item_count(); ++j) r += inst.price(j) * menu.entries[idx].items[as_index(j)];
      if (!worst || r < *worst) worst = r;
    }
    revenue += e.prob * *worst;
  }
  return revenue;
}

Json menu_to_json(const Instance& inst, const Menu& menu) {
  Json entries = Json::array();
  for (const auto& e : menu.entries) {
    Json alloc = Json::object();
    alloc["0"] = rational_to_json(e.none);
    for (Item j = 0; j < inst.item_count(); ++j) {
      if (e.items[as_index(j)] != 0) alloc[inst.item_ids[as_index(j)]] = rational_to_json(e.items[as_index(j)]);
    }
    entries.push_back(Json{{"alloc", alloc}});
  }
  return Json{{"entries", entries}};
}

Menu menu_from_json(const Instance& inst, const Json& doc) {
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
    throw InvalidInput("menu: expected {\"entries\":[...]}");
  }
  if (inst.find_item("0")) throw InvalidInput("menu: item id \"0\" clashes with the no-purchase key");
  Menu menu;
  const auto& entries = doc["entries"];
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const std::string at = "/entries/" + std::to_string(e);
    if (!entries[e].contains("alloc") || !entries[e]["alloc"].is_object()) throw InvalidInput(at + ": missing alloc");
    MenuEntry entry{Rational(0), std::vector<Rational>(as_index(inst.item_count()), Rational(0))};
    for (const auto& [key, value] : entries[e]["alloc"].items()) {
      Rational v = rational_from_json(value, at + "/alloc/" + key);
      if (key == "0") {
        entry.none = v;
      } else {
        entry.items[as_index(inst.item(key))] = v;
      }
    }
    menu.entries.push_back(std::move(entry));
  }
  validate_menu(menu, inst.item_count());
  return menu;
}

}  // namespace fixedprice
