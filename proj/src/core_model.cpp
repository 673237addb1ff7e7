#include "fixedprice/core_model.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "fixedprice/errors.hpp"

namespace fixedprice {

bool starts_with(const RankedList& list, const Prefix& prefix) {
  return prefix.size() <= list.size() && std::equal(prefix.begin(), prefix.end(), list.begin());
}

Rational ListDistribution::total() const {
  Rational sum = 0;
  for (const auto& e : entries) sum += e.prob;
  return sum;
}

std::optional<std::size_t> ListDistribution::find(const RankedList& list) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].list == list) return i;
  }
  return std::nullopt;
}

std::size_t ListDistribution::max_length() const {
  std::size_t len = 0;
  for (const auto& e : entries) {
    if (e.prob > 0) len = std::max(len, e.list.size());
  }
  return len;
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v;
  }
  return out;
}

namespace {

std::string raw_list(const RankedList& list) {
  std::string s = "(";
  for (std::size_t k = 0; k < list.size(); ++k) {
    if (k > 0) s += ",";
    s += std::to_string(list[k]);
  }
  return s + ")";
}

}  // namespace

ValidationReport validate_distribution(const ListDistribution& dist) {
  ValidationReport report;
  auto& out = report.violations;
  if (dist.item_count < 0 || dist.item_count > kMaxItems) {
    out.push_back("item count " + std::to_string(dist.item_count) + " outside 0.." +
                  std::to_string(kMaxItems));
    return report;
  }
  std::map<RankedList, int> seen;
  for (std::size_t i = 0; i < dist.entries.size(); ++i) {
    const auto& e = dist.entries[i];
    std::string where = "list " + std::to_string(i) + " " + raw_list(e.list);
    ItemSet used;
    for (Item j : e.list) {
      if (j < 0 || j >= dist.item_count) {
        out.push_back(where + ": unknown item " + std::to_string(j));
        continue;
      }
      if (used.contains(j)) out.push_back(where + ": item " + std::to_string(j) + " repeated");
      used.insert(j);
    }
    if (e.prob <= 0) out.push_back(where + ": probability " + to_string(e.prob) + " not positive");
    if (e.prob > 1) out.push_back(where + ": probability " + to_string(e.prob) + " exceeds 1");
    if (seen[e.list]++ == 1) out.push_back(where + ": duplicate list");
  }
  Rational sum = dist.total();
  if (sum != 1) out.push_back("probabilities sum to " + to_string(sum) + " ≠ 1");
  return report;
}

ListDistribution canonical(ListDistribution dist) {
  std::sort(dist.entries.begin(), dist.entries.end(), [](const ListEntry& a, const ListEntry& b) {
    if (a.list.size() != b.list.size()) return a.list.size() < b.list.size();
    return a.list < b.list;
  });
  return dist;
}

std::optional<Item> Instance::find_item(std::string_view id) const {
  for (std::size_t i = 0; i < item_ids.size(); ++i) {
    if (item_ids[i] == id) return static_cast<Item>(i);
  }
  return std::nullopt;
}

Item Instance::item(std::string_view id) const {
  if (auto i = find_item(id)) return *i;
  throw InvalidInput("unknown item \"" + std::string(id) + "\"");
}

void validate_instance(const Instance& inst) {
  std::vector<std::string> problems;
  if (inst.prices.size() != inst.item_ids.size()) {
    problems.push_back("price count " + std::to_string(inst.prices.size()) +
                       " differs from item count " + std::to_string(inst.item_ids.size()));
  }
  for (std::size_t i = 0; i < inst.item_ids.size(); ++i) {
    if (inst.item_ids[i].empty()) problems.push_back("item " + std::to_string(i) + " has an empty id");
    for (std::size_t k = 0; k < i; ++k) {
      if (inst.item_ids[k] == inst.item_ids[i]) {
        problems.push_back("duplicate item id \"" + inst.item_ids[i] + "\"");
      }
    }
  }
  for (std::size_t i = 0; i < inst.prices.size(); ++i) {
    if (inst.prices[i] < 0) problems.push_back("negative price for item " + std::to_string(i));
  }
  if (inst.dist.item_count != inst.item_count()) {
    problems.push_back("distribution covers " + std::to_string(inst.dist.item_count) +
                       " items, instance has " + std::to_string(inst.item_count()));
  }
  auto report = validate_distribution(inst.dist);
  problems.insert(problems.end(), report.violations.begin(), report.violations.end());
  if (!problems.empty()) {
    std::string msg = "invalid instance: ";
    for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
    throw InvalidInput(msg);
  }
}

std::string format_list(const Instance& inst, const RankedList& list) {
  std::string s = "(";
  for (std::size_t k = 0; k < list.size(); ++k) {
    if (k > 0) s += ",";
    s += inst.item_ids.at(static_cast<std::size_t>(list[k]));
  }
  return s + ")";
}

std::string format_set(const Instance& inst, ItemSet set) {
  std::string s = "{";
  bool first = true;
  for (Item i : set.items()) {
    if (!first) s += ",";
    first = false;
    s += inst.item_ids.at(static_cast<std::size_t>(i));
  }
  return s + "}";
}

Rational choice_probability(const ListDistribution& dist, ItemSet assortment, Item j,
                            const Prefix& given) {
  if (!assortment.contains(j)) {
    throw InvalidInput("item " + std::to_string(j) + " is not in the assortment");
  }
  if (assortment.intersects(to_set(given))) {
    throw InvalidInput("assortment intersects the conditioning prefix");
  }
  Rational mass = 0;
  Rational hits = 0;
  for (const auto& e : dist.entries) {
    if (!starts_with(e.list, given)) continue;
    mass += e.prob;
    for (std::size_t k = given.size(); k < e.list.size(); ++k) {
      if (assortment.contains(e.list[k])) {
        if (e.list[k] == j) hits += e.prob;
        break;
      }
    }
  }
  if (mass == 0) throw InvalidInput("conditioning prefix " + raw_list(given) + " is not realizable");
  return hits / mass;
}

Rational choice_probability(const Instance& inst, ItemSet assortment, Item j, const Prefix& given) {
  return choice_probability(inst.dist, assortment, j, given);
}

Rational assortment_revenue(const Instance& inst, ItemSet assortment) {
  Rational revenue = 0;
  for (const auto& e : inst.dist.entries) {
    for (Item j : e.list) {
      if (assortment.contains(j)) {
        revenue += e.prob * inst.price(j);
        break;
      }
    }
  }
  return revenue;
}

AssortmentOptimum optimal_assortment(const Instance& inst, int cap) {
  const int n = inst.item_count();
  if (n > cap) {
    throw CapExceeded("assortment enumeration over " + std::to_string(n) +
                      " items exceeds the cap of " + std::to_string(cap));
  }
  AssortmentOptimum best{ItemSet(), assortment_revenue(inst, ItemSet())};
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t m = 1; m < count; ++m) {
    ItemSet s(static_cast<std::uint32_t>(m));
    Rational value = assortment_revenue(inst, s);
    if (value > best.value || (value == best.value && lex_less(s, best.assortment))) {
      best = {s, value};
    }
  }
  return best;
}

}  // namespace fixedprice
