#include "fixedprice/model_descriptor.hpp"

#include <random>

#include "fixedprice/choice_models.hpp"
#include "fixedprice/errors.hpp"
#include "fixedprice/lotteries.hpp"

namespace fixedprice {

namespace {

const Json& need(const Json& d, const char* key) {
  if (!d.contains(key)) throw InvalidInput(std::string("model descriptor: missing \"") + key + "\"");
  return d.at(key);
}

Rational rational_field(const Json& d, const char* key, const Rational& fallback) {
  return d.contains(key) ? rational_from_json(d.at(key), std::string("/") + key) : fallback;
}

// Items and prices; the distribution is filled in by the caller.
Instance items_of(const Json& d) {
  Instance inst;
  const Json& items = need(d, "items");
  if (!items.is_array() || items.empty()) throw InvalidInput("model descriptor: \"items\" must be a nonempty array");
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string at = "/items/" + std::to_string(i);
    if (!items[i].contains("id") || !items[i]["id"].is_string()) throw InvalidInput(at + ": missing id");
    inst.item_ids.push_back(items[i]["id"].get<std::string>());
    inst.prices.push_back(items[i].contains("price") ? rational_from_json(items[i]["price"], at + "/price") : Rational(0));
  }
  inst.dist.item_count = inst.item_count();
  return inst;
}

std::vector<Rational> per_item(const Instance& inst, const Json& d, const char* key, const Rational& fallback) {
  std::vector<Rational> out(static_cast<std::size_t>(inst.item_count()), fallback);
  if (!d.contains(key)) return out;
  if (!d.at(key).is_object()) throw InvalidInput(std::string("/") + key + ": expected an object keyed by item id");
  for (const auto& [id, v] : d.at(key).items()) {
    out[static_cast<std::size_t>(inst.item(id))] = rational_from_json(v, std::string("/") + key + "/" + id);
  }
  return out;
}

std::vector<std::vector<Item>> nests_of(const Instance& inst, const Json& d) {
  std::vector<std::vector<Item>> nests;
  for (const auto& nest : need(d, "nests")) {
    std::vector<Item> items;
    for (const auto& id : nest) items.push_back(inst.item(id.get<std::string>()));
    nests.push_back(std::move(items));
  }
  return nests;
}

Rational w0_of(const Json& d) {
  if (d.contains("w0")) return rational_from_json(d.at("w0"), "/w0");
  return rational_field(d, "no_purchase_weight", Rational(1));
}

Instance random_instance(const Json& d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n = d.value("n", 4);
  const int lists = d.value("lists", 5);
  if (n < 1 || n > kMaxGeneratedItems || lists < 1 || lists > 64) {
    throw InvalidInput("random model: need 1 <= n <= 8 and 1 <= lists <= 64");
  }
  Instance inst;
  for (int j = 0; j < n; ++j) {
    inst.item_ids.push_back(std::string(1, static_cast<char>('A' + j)));
    inst.prices.emplace_back(static_cast<long>(std::uniform_int_distribution<int>(1, 5)(rng)));
  }
  inst.dist.item_count = n;
  std::vector<Rational> weight;
  Rational total = 0;
  for (int attempt = 0; static_cast<int>(inst.dist.entries.size()) < lists && attempt < 100 * lists; ++attempt) {
    std::vector<Item> perm(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) perm[static_cast<std::size_t>(j)] = j;
    std::shuffle(perm.begin(), perm.end(), rng);
    perm.resize(static_cast<std::size_t>(std::uniform_int_distribution<int>(0, n)(rng)));
    if (inst.dist.find(perm)) continue;
    Rational w(std::uniform_int_distribution<int>(1, 9)(rng));
    inst.dist.entries.push_back({perm, w});
    total += w;
  }
  for (auto& e : inst.dist.entries) e.prob /= total;
  return inst;
}

}  // namespace

Instance instance_from_model(const Json& d, std::uint64_t seed) {
  if (!d.is_object()) throw InvalidInput("model descriptor must be a JSON object");
  const std::string model = need(d, "model").get<std::string>();
  if (model == "topk-gap") {
    return gen_topk_gap_instance(need(d, "n").get<int>(), rational_from_json(need(d, "base"), "/base"));
  }
  if (model == "random") return random_instance(d, seed);
  if (model == "mixture") {
    Instance inst;
    if (d.contains("base_instance")) {
      inst = instance_from_json(d.at("base_instance"));
    } else {
      inst = instance_from_model(need(d, "base"), seed);
    }
    inst.dist = mix_with_singletons(inst.dist, per_item(inst, d, "alpha", Rational(0)));
    validate_instance(inst);
    return inst;
  }
  Instance inst = items_of(d);
  if (model == "mnl") {
    inst.dist = gen_mnl({per_item(inst, d, "weights", Rational(1)), w0_of(d)});
  } else if (model == "markov") {
    MarkovChainParams p;
    p.arrival = per_item(inst, d, "arrival", Rational(0));
    p.arrival_none = rational_field(d, "arrival_none", Rational(0));
    const std::size_t n = static_cast<std::size_t>(inst.item_count());
    p.transition.assign(n, std::vector<Rational>(n, Rational(0)));
    p.exit.assign(n, Rational(0));
    const Json& t = need(d, "transition");
    for (const auto& [from, row] : t.items()) {
      auto i = static_cast<std::size_t>(inst.item(from));
      for (const auto& [to, v] : row.items()) {
        Rational q = rational_from_json(v, "/transition/" + from + "/" + to);
        if (to == "0") {
          p.exit[i] = q;
        } else {
          p.transition[i][static_cast<std::size_t>(inst.item(to))] = q;
        }
      }
    }
    inst.dist = gen_markov_chain(p);
  } else if (model == "eba") {
    inst.dist = gen_elimination_by_aspects({per_item(inst, d, "weights", Rational(1)), w0_of(d), nests_of(inst, d)});
  } else if (model == "nl3") {
    if (inst.item_count() != 3) throw InvalidInput("nl3 model needs exactly 3 items");
    auto w = per_item(inst, d, "weights", Rational(1));
    inst.dist = gen_nested_logit_3item({to_real(w[0]), to_real(w[1]), to_real(w[2])}, to_real(w0_of(d)),
                                       to_real(rational_from_json(need(d, "gamma"), "/gamma")));
  } else if (model == "nl4sym") {
    inst.dist = gen_nested_logit_4item_symmetric(to_real(rational_from_json(need(d, "weight"), "/weight")),
                                                 to_real(rational_from_json(need(d, "gamma"), "/gamma")),
                                                 inst.item_count());
  } else {
    throw InvalidInput("unknown model \"" + model + "\"");
  }
  validate_instance(inst);
  return inst;
}

}  // namespace fixedprice
