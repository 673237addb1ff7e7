#include "fixedprice/multibuyer.hpp"

#include <algorithm>

#include "fixedprice/errors.hpp"

namespace fixedprice {

namespace {

std::size_t as_index(Item j) { return static_cast<std::size_t>(j); }

int position_on(const RankedList& list, Item j) {
  for (std::size_t k = 0; k < list.size(); ++k) {
    if (list[k] == j) return static_cast<int>(k);
  }
  return -1;
}

}  // namespace

void validate_multibuyer(const MultiBuyerInstance& inst) {
  if (inst.prices.size() != inst.item_ids.size()) throw InvalidInput("one price per item is required");
  for (const auto& p : inst.prices) {
    if (p < 0) throw InvalidInput("prices must be nonnegative");
  }
  if (inst.buyers.empty()) throw InvalidInput("at least one buyer is required");
  for (std::size_t i = 0; i < inst.buyers.size(); ++i) {
    if (inst.buyers[i].item_count != inst.item_count()) throw InvalidInput("buyer distribution has the wrong item count");
    auto report = validate_distribution(inst.buyers[i]);
    if (!report.ok()) throw InvalidInput("buyer " + std::to_string(i + 1) + ": " + report.summary());
  }
}

std::vector<Profile> enumerate_profiles(const MultiBuyerInstance& inst) {
  std::size_t count = 1;
  for (const auto& b : inst.buyers) {
    if (b.entries.empty()) return {};
    if (count > kMaxProfiles / b.entries.size()) {
      throw CapExceeded("more than " + std::to_string(kMaxProfiles) + " report profiles");
    }
    count *= b.entries.size();
  }
  std::vector<Profile> out;
  out.reserve(count);
  Profile p(inst.buyers.size(), 0);
  for (;;) {
    out.push_back(p);
    bool done = true;
    for (std::size_t i = p.size(); i-- > 0;) {
      if (++p[i] < inst.buyers[i].entries.size()) {
        done = false;
        break;
      }
      p[i] = 0;
    }
    if (done) return out;
  }
}

Rational profile_probability(const MultiBuyerInstance& inst, const Profile& profile) {
  Rational p = 1;
  for (std::size_t i = 0; i < profile.size(); ++i) p *= inst.buyers[i].entries[profile[i]].prob;
  return p;
}

MultiBuyerLP build_multibuyer_lp(const MultiBuyerInstance& inst, IncentiveMode mode) {
  validate_multibuyer(inst);
  MultiBuyerLP out;
  out.profiles = enumerate_profiles(inst);
  const std::size_t buyers = inst.buyers.size();
  std::vector<std::size_t> stride(buyers, 1);
  for (std::size_t i = buyers; i-- > 1;) stride[i - 1] = stride[i] * inst.buyers[i].entries.size();
  auto profile_id = [&](const Profile& p) {
    std::size_t id = 0;
    for (std::size_t i = 0; i < buyers; ++i) id += p[i] * stride[i];
    return id;
  };
  auto list_of = [&](std::size_t i, std::size_t e) -> const RankedList& { return inst.buyers[i].entries[e].list; };
  auto tag = [&](const Profile& p) {
    std::string s;
    for (std::size_t i = 0; i < buyers; ++i) {
      s += (i ? "," : "");
      for (Item j : list_of(i, p[i])) s += inst.item_ids[as_index(j)];
    }
    return "<" + s + ">";
  };

  out.var_of.resize(out.profiles.size());
  for (std::size_t pid = 0; pid < out.profiles.size(); ++pid) {
    const auto& p = out.profiles[pid];
    Rational prob = profile_probability(inst, p);
    out.var_of[pid].resize(buyers);
    for (std::size_t i = 0; i < buyers; ++i) {
      for (Item j : list_of(i, p[i])) {
        int v = out.lp.add_variable("X" + std::to_string(i + 1) + "[" + inst.item_ids[as_index(j)] + "|" + tag(p) + "]");
        out.lp.set_objective(v, prob * inst.price(j));
        out.var_of[pid][i].push_back(v);
      }
    }
  }
  for (std::size_t pid = 0; pid < out.profiles.size(); ++pid) {
    const auto& p = out.profiles[pid];
    for (Item j = 0; j < inst.item_count(); ++j) {
      LpRow row{"supply" + tag(p) + inst.item_ids[as_index(j)], {}, Relation::LessEqual, Rational(1)};
      for (std::size_t i = 0; i < buyers; ++i) {
        int pos = position_on(list_of(i, p[i]), j);
        if (pos >= 0) row.terms.push_back({out.var_of[pid][i][static_cast<std::size_t>(pos)], Rational(1)});
      }
      if (row.terms.size() > 1) out.lp.add_row(std::move(row));
    }
    for (std::size_t i = 0; i < buyers; ++i) {
      LpRow row{"unit" + std::to_string(i + 1) + tag(p), {}, Relation::LessEqual, Rational(1)};
      for (int v : out.var_of[pid][i]) row.terms.push_back({v, Rational(1)});
      out.lp.add_row(std::move(row));
    }
  }
  // Incentive rows: truthful list `own` versus misreport `other` for buyer i.
  for (std::size_t i = 0; i < buyers; ++i) {
    const auto& entries = inst.buyers[i].entries;
    for (std::size_t own = 0; own < entries.size(); ++own) {
      const auto& list = entries[own].list;
      for (std::size_t depth = 1; depth <= list.size(); ++depth) {
        for (std::size_t other = 0; other < entries.size(); ++other) {
          if (other == own) continue;
          LpRow bic{"bic" + std::to_string(i + 1), {}, Relation::GreaterEqual, Rational(0), true};
          for (std::size_t pid = 0; pid < out.profiles.size(); ++pid) {
            const auto& p = out.profiles[pid];
            if (p[i] != own) continue;
            Profile q = p;
            q[i] = other;
            const std::size_t qid = profile_id(q);
            Rational weight = 1;
            for (std::size_t b = 0; b < buyers; ++b) {
              if (b != i) weight *= inst.buyers[b].entries[p[b]].prob;
            }
            LpRow dsic{"dsic" + std::to_string(i + 1) + tag(p) + "/" + std::to_string(depth) + "/" + tag(q),
                       {}, Relation::GreaterEqual, Rational(0), true};
            for (std::size_t k = 0; k < depth; ++k) {
              dsic.terms.push_back({out.var_of[pid][i][k], Rational(1)});
              int pos = position_on(entries[other].list, list[k]);
              if (pos >= 0) dsic.terms.push_back({out.var_of[qid][i][static_cast<std::size_t>(pos)], Rational(-1)});
            }
            if (mode == IncentiveMode::DominantStrategy) {
              out.lp.add_row(std::move(dsic));
            } else {
              for (auto& t : dsic.terms) bic.terms.push_back({t.var, t.coef * weight});
            }
          }
          if (mode == IncentiveMode::Bayesian) {
            bic.name += format_list(Instance{inst.item_ids, inst.prices, {}}, list) + "/" + std::to_string(depth) + "/" +
                        format_list(Instance{inst.item_ids, inst.prices, {}}, entries[other].list);
            out.lp.add_row(std::move(bic));
          }
        }
      }
    }
  }
  return out;
}

Rational solve_multibuyer_lp(const MultiBuyerInstance& inst, IncentiveMode mode) {
  auto mlp = build_multibuyer_lp(inst, mode);
  auto sol = solve_lp(mlp.lp);
  if (sol.status != LpStatus::Optimal) throw InternalInconsistency("multi-buyer LP is " + to_string(sol.status));
  return sol.value;
}

Assignment serial_dictatorship(const MultiBuyerInstance& inst, const std::vector<const RankedList*>& lists,
                               const std::vector<std::size_t>& order) {
  const std::size_t buyers = lists.size();
  std::vector<std::size_t> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != i || sorted.size() != buyers) throw InvalidInput("serial dictatorship order must list each buyer once");
  }
  Assignment out(buyers);
  ItemSet taken;
  for (std::size_t i : order) {
    for (Item j : *lists[i]) {
      if (!taken.contains(j)) {
        out[i] = j;
        taken.insert(j);
        break;
      }
    }
  }
  (void)inst;
  return out;
}

Assignment top_trading_cycles(const MultiBuyerInstance& inst, const std::vector<const RankedList*>& lists,
                              const std::vector<std::optional<Item>>& endowment) {
  const std::size_t buyers = lists.size();
  if (endowment.size() != buyers) throw InvalidInput("top trading cycles needs an endowment entry per buyer");
  std::vector<int> owner(as_index(inst.item_count()), -1);
  for (std::size_t i = 0; i < buyers; ++i) {
    if (!endowment[i]) continue;
    Item j = *endowment[i];
    if (j < 0 || j >= inst.item_count()) throw InvalidInput("endowment refers to an unknown item");
    if (owner[as_index(j)] != -1) throw InvalidInput("unsupported endowment: an item has two owners");
    owner[as_index(j)] = static_cast<int>(i);
  }
  for (int o : owner) {
    if (o == -1) throw InvalidInput("unsupported endowment: every item needs an owner");
  }
  Assignment out(buyers);
  std::vector<bool> active(buyers, true);
  ItemSet available = ItemSet::full(inst.item_count());
  auto favorite = [&](std::size_t i) -> std::optional<Item> {
    for (Item j : *lists[i]) {
      if (available.contains(j)) return j;
    }
    return std::nullopt;
  };
  for (;;) {
    bool removed = false;
    for (std::size_t i = 0; i < buyers; ++i) {
      if (active[i] && !favorite(i)) {
        active[i] = false;
        if (endowment[i]) available.erase(*endowment[i]);
        removed = true;
      }
    }
    if (removed) continue;
    std::vector<std::size_t> left;
    for (std::size_t i = 0; i < buyers; ++i) {
      if (active[i]) left.push_back(i);
    }
    if (left.empty()) return out;
    // Follow pointers from any active buyer until a buyer repeats.
    std::vector<int> seen(buyers, -1);
    std::size_t cur = left.front();
    for (int step = 0; seen[cur] < 0; ++step) {
      seen[cur] = step;
      cur = static_cast<std::size_t>(owner[as_index(*favorite(cur))]);
    }
    std::vector<std::size_t> cycle{cur};
    for (std::size_t b = static_cast<std::size_t>(owner[as_index(*favorite(cur))]); b != cur;
         b = static_cast<std::size_t>(owner[as_index(*favorite(b))])) {
      cycle.push_back(b);
    }
    std::vector<Item> gets;
    for (std::size_t b : cycle) gets.push_back(*favorite(b));
    for (std::size_t c = 0; c < cycle.size(); ++c) {
      out[cycle[c]] = gets[c];
      active[cycle[c]] = false;
      available.erase(gets[c]);
    }
  }
}

Rational eval_fixed_multibuyer_mechanism(const MultiBuyerInstance& inst, const FixedMechanism& mechanism) {
  validate_multibuyer(inst);
  Rational revenue = 0;
  for (const auto& p : enumerate_profiles(inst)) {
    std::vector<const RankedList*> lists;
    for (std::size_t i = 0; i < p.size(); ++i) lists.push_back(&inst.buyers[i].entries[p[i]].list);
    Assignment a = mechanism.kind == FixedMechanism::Kind::SerialDictatorship
                       ? serial_dictatorship(inst, lists, mechanism.order)
                       : top_trading_cycles(inst, lists, mechanism.endowment);
    Rational sold = 0;
    for (const auto& j : a) {
      if (j) sold += inst.price(*j);
    }
    revenue += profile_probability(inst, p) * sold;
  }
  return revenue;
}

MultiBuyerInstance multibuyer_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("items") || !doc.contains("buyers")) {
    throw InvalidInput("multi-buyer instance: expected {\"items\":[...],\"buyers\":[...]}");
  }
  MultiBuyerInstance inst;
  const auto& items = doc["items"];
  if (!items.is_array()) throw InvalidInput("/items: expected an array");
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string at = "/items/" + std::to_string(i);
    if (!items[i].contains("id") || !items[i]["id"].is_string()) throw InvalidInput(at + ": missing id");
    if (!items[i].contains("price")) throw InvalidInput(at + ": missing price");
    inst.item_ids.push_back(items[i]["id"].get<std::string>());
    inst.prices.push_back(rational_from_json(items[i]["price"], at + "/price"));
  }
  const auto& buyers = doc["buyers"];
  if (!buyers.is_array()) throw InvalidInput("/buyers: expected an array");
  for (std::size_t b = 0; b < buyers.size(); ++b) {
    const std::string at = "/buyers/" + std::to_string(b);
    const Json& lists = buyers[b].is_object() && buyers[b].contains("lists") ? buyers[b]["lists"] : buyers[b];
    inst.buyers.push_back(distribution_from_json(lists, inst.item_ids, at + "/lists"));
  }
  validate_multibuyer(inst);
  return inst;
}

MultiBuyerInstance load_multibuyer(const std::string& path) {
  return multibuyer_from_json(parse_json_text(read_text_file(path), path));
}

Json multibuyer_to_json(const MultiBuyerInstance& inst) {
  Json items = Json::array();
  for (std::size_t i = 0; i < inst.item_ids.size(); ++i) {
    items.push_back(Json{{"id", inst.item_ids[i]}, {"price", rational_to_json(inst.prices[i])}});
  }
  Json buyers = Json::array();
  for (const auto& b : inst.buyers) buyers.push_back(Json{{"lists", distribution_to_json(b, inst.item_ids)}});
  return Json{{"items", items}, {"buyers", buyers}};
}

}  // namespace fixedprice
