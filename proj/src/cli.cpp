#include "fixedprice/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "fixedprice/errors.hpp"
#include "fixedprice/lotteries.hpp"
#include "fixedprice/mechanism.hpp"
#include "fixedprice/model_descriptor.hpp"
#include "fixedprice/multibuyer.hpp"
#include "fixedprice/robust.hpp"
#include "fixedprice/stopping.hpp"

namespace fixedprice {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 2;

struct Options {
  std::string instance;
  std::string what;
  std::string model;
  std::string params;
  std::string out;
  double tolerance = 1e-9;
  bool tolerance_given = false;
  int cap = -1;
  bool pretty = false;
  bool lps = false;
};

struct Report {
  Json doc;
  int exit_code = kExitOk;
};

Json value_json(const Rational& q) {
  return Json{{"value", to_string(q)}, {"decimal", to_double(q)}};
}

Json ids_json(const Instance& inst, const std::vector<Item>& items) {
  Json arr = Json::array();
  for (Item j : items) arr.push_back(inst.item_ids[static_cast<std::size_t>(j)]);
  return arr;
}

Json set_json(const Instance& inst, ItemSet s) { return ids_json(inst, s.items()); }

// --params takes JSON text or a path to a JSON file.
bool looks_like_json(const std::string& text) {
  auto first = text.find_first_not_of(" \t\r\n");
  return first != std::string::npos && (text[first] == '{' || text[first] == '[');
}

Json params_json(const Options& opt) {
  if (opt.params.empty()) return Json::object();
  if (looks_like_json(opt.params)) return parse_json_text(opt.params, "--params");
  return parse_json_text(read_text_file(opt.params), opt.params);
}

// --model is a model name, a descriptor file or descriptor JSON text.
Json model_json(const Options& opt) {
  Json d = params_json(opt);
  if (opt.model.empty()) return d;
  Json base;
  if (looks_like_json(opt.model)) {
    base = parse_json_text(opt.model, "--model");
  } else if (std::filesystem::is_regular_file(opt.model)) {
    base = parse_json_text(read_text_file(opt.model), opt.model);
  } else {
    d["model"] = opt.model;
    return d;
  }
  if (!base.is_object()) throw InvalidInput("--model: expected a JSON object");
  base.update(d);
  return base;
}

Instance need_instance(const Options& opt) {
  if (opt.instance.empty()) throw InvalidInput("--instance is required");
  return load_instance(opt.instance);
}

std::optional<Rational> tolerance_of(const Options& opt) {
  if (!opt.tolerance_given) return std::nullopt;
  return rational_from_real(Real(opt.tolerance), conversion_tolerance());
}

Mechanism mechanism_for_check(const Instance& inst, const Options& opt) {
  Json p = params_json(opt);
  if (p.contains("mechanism")) return mechanism_from_json(inst, p.at("mechanism"));
  if (!p.empty()) return mechanism_from_json(inst, p);
  return solve_mechanism_lp(inst).mechanism;
}

Report do_gen(const Options& opt) {
  Json d = model_json(opt);
  std::uint64_t seed = 0;
  if (const char* env = std::getenv("FIXEDPRICE_SEED")) seed = std::strtoull(env, nullptr, 10);
  Instance inst = instance_from_model(d, seed);
  std::string text = serialize_instance(inst, opt.pretty);
  Report r;
  if (opt.out.empty()) {
    r.doc = parse_json_text(text);
    return r;
  }
  std::ofstream f(opt.out, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + opt.out);
  f << text << '\n';
  r.doc = Json{{"written", opt.out}, {"items", inst.item_count()}, {"lists", inst.dist.entries.size()}};
  return r;
}

Report do_solve(const Options& opt) {
  Instance inst = need_instance(opt);
  Report r;
  if (opt.what == "assortment") {
    auto best = optimal_assortment(inst, opt.cap > 0 ? opt.cap : 20);
    r.doc = value_json(best.value);
    r.doc["assortment"] = set_json(inst, best.assortment);
  } else if (opt.what == "mech") {
    auto best = solve_mechanism_lp(inst);
    r.doc = value_json(best.value());
    r.doc["mechanism"] = mechanism_to_json(inst, best.mechanism);
  } else if (opt.what == "f") {
    auto best = solve_set_function_lp(inst);
    r.doc = value_json(best.value());
    Json f = Json::array();
    for (std::uint32_t mask = 0; mask < best.f.values.size(); ++mask) {
      f.push_back({{"set", set_json(inst, ItemSet(mask))}, {"value", to_string(best.f.values[mask])}});
    }
    r.doc["set_function"] = f;
  } else if (opt.what == "bm") {
    r.doc = value_json(solve_bm_lp(inst).value);
  } else if (opt.what == "topk") {
    Json p = params_json(opt);
    std::optional<int> k;
    if (p.contains("k")) k = p.at("k").get<int>();
    auto best = best_topk_lottery(inst, k, opt.cap > 0 ? opt.cap : kDefaultAssortmentCap);
    r.doc = value_json(best.value);
    r.doc["k"] = best.k;
    r.doc["support"] = set_json(inst, best.support);
  } else if (opt.what == "policy") {
    auto best = optimal_policy_bruteforce(inst, opt.cap > 0 ? opt.cap : kDefaultPolicyCap);
    r.doc = value_json(best.value);
    Json policy = Json::object();
    for (Item j = 0; j < inst.item_count(); ++j) {
      Json sets = Json::array();
      for (ItemSet s : best.policy.minimal_sets(j)) sets.push_back(set_json(inst, s));
      policy[inst.item_ids[static_cast<std::size_t>(j)]] = sets;
    }
    r.doc["stop_when_seen"] = policy;
  } else {
    throw InvalidInput("solve: unknown --what \"" + opt.what + "\" (assortment|mech|f|bm|topk|policy)");
  }
  return r;
}

Report do_check(const Options& opt) {
  Instance inst = need_instance(opt);
  Report r;
  bool holds = true;
  Json witness;
  if (opt.what == "history-monotone") {
    auto res = check_history_monotone(inst.dist, tolerance_of(opt));
    holds = res.holds;
    if (res.witness) {
      const auto& w = *res.witness;
      witness = {{"rho", ids_json(inst, w.rho)},
                 {"rho_prime", ids_json(inst, w.rho_prime)},
                 {"S", set_json(inst, w.assortment)},
                 {"j", inst.item_ids[static_cast<std::size_t>(w.item)]}};
    }
  } else if (opt.what == "ic") {
    Mechanism m = mechanism_for_check(inst, opt);
    auto rep = verify_ic(inst, m);
    holds = rep.ok();
    if (!holds) {
      witness = Json::object();
      witness["feasibility"] = rep.feasibility_problems;
      if (!rep.violations.empty()) {
        const auto& v = rep.violations.front();
        witness["list"] = ids_json(inst, inst.dist.entries[v.list].list);
        witness["depth"] = v.depth;
        witness["reported"] = ids_json(inst, inst.dist.entries[v.other].list);
        witness["shortfall"] = to_string(v.shortfall);
      }
    }
  } else if (opt.what == "submodular") {
    Mechanism m = mechanism_for_check(inst, opt);
    try {
      SetFunction f = mechanism_to_set_function(inst, m);
      if (auto v = find_submodularity_violation(f)) {
        holds = false;
        witness = {{"base", set_json(inst, v->base)},
                   {"first", inst.item_ids[static_cast<std::size_t>(v->first)]},
                   {"second", inst.item_ids[static_cast<std::size_t>(v->second)]}};
      }
    } catch (const InvalidInput& e) {
      holds = false;
      witness = {{"reason", e.what()}};
    }
  } else if (opt.what == "containment") {
    Mechanism m = mechanism_for_check(inst, opt);
    auto w = containment_witness(inst, m);
    holds = w.ok();
    Json inclusion = Json::object();
    for (Item j = 0; j < inst.item_count(); ++j) {
      inclusion[inst.item_ids[static_cast<std::size_t>(j)]] = to_string(w.inclusion[static_cast<std::size_t>(j)]);
    }
    witness = {{"inclusion", inclusion}, {"violations", w.violations}};
  } else {
    throw InvalidInput("check: unknown --what \"" + opt.what + "\" (ic|history-monotone|submodular|containment)");
  }
  r.doc = {{"holds", holds}};
  if (!witness.is_null()) r.doc["witness"] = witness;
  r.exit_code = holds ? kExitOk : kExitCheckFailed;
  return r;
}

Report do_compare(const Options& opt) {
  if (!opt.lps) throw InvalidInput("compare: only --lps is supported");
  Instance inst = need_instance(opt);
  Rational assortment = optimal_assortment(inst, opt.cap > 0 ? opt.cap : 20).value;
  Rational mech = solve_mechanism_lp(inst).value();
  Rational bm = solve_bm_lp(inst).value;
  Report r;
  r.doc = {{"OPT_S", value_json(assortment)}, {"OPT_x", value_json(mech)}, {"OPT_BM", value_json(bm)}};
  if (inst.item_count() <= kMaxSetFunctionLpItems) r.doc["OPT_f"] = value_json(solve_set_function_lp(inst).value());
  r.doc["chain_holds"] = assortment <= mech && mech <= bm;
  return r;
}

Report do_robust(const Options& opt) {
  Instance inst = need_instance(opt);
  Json p = params_json(opt);
  Report r;
  Menu menu;
  if (p.contains("menu")) {
    menu = menu_from_json(inst, p.at("menu"));
  } else if (!p.empty()) {
    menu = menu_from_json(inst, p);
  } else {
    auto best = solve_mechanism_lp(inst);
    menu = mechanism_to_menu(inst, best.mechanism);
    r.doc["mechanism_revenue"] = value_json(best.value());
  }
  r.doc["robust_revenue"] = value_json(robust_revenue(inst, menu));
  r.doc["menu"] = menu_to_json(inst, menu);
  return r;
}

Report do_multibuyer(const Options& opt) {
  if (opt.instance.empty()) throw InvalidInput("--instance is required");
  MultiBuyerInstance inst = load_multibuyer(opt.instance);
  Json p = params_json(opt);
  Report r;
  if (opt.what == "dsic") {
    r.doc = value_json(solve_multibuyer_lp(inst, IncentiveMode::DominantStrategy));
  } else if (opt.what == "bic") {
    r.doc = value_json(solve_multibuyer_lp(inst, IncentiveMode::Bayesian));
  } else if (opt.what == "serial") {
    FixedMechanism m;
    m.kind = FixedMechanism::Kind::SerialDictatorship;
    if (p.contains("order")) {
      m.order = p.at("order").get<std::vector<std::size_t>>();
    } else {
      for (std::size_t i = 0; i < inst.buyers.size(); ++i) m.order.push_back(i);
    }
    r.doc = value_json(eval_fixed_multibuyer_mechanism(inst, m));
  } else if (opt.what == "ttc") {
    if (!p.contains("endowment")) throw InvalidInput("ttc needs --params {\"endowment\":[item id per buyer]}");
    FixedMechanism m;
    m.kind = FixedMechanism::Kind::TopTradingCycles;
    for (const auto& e : p.at("endowment")) {
      if (e.is_null()) {
        m.endowment.emplace_back(std::nullopt);
        continue;
      }
      auto id = e.get<std::string>();
      auto it = std::find(inst.item_ids.begin(), inst.item_ids.end(), id);
      if (it == inst.item_ids.end()) throw InvalidInput("unknown item \"" + id + "\" in endowment");
      m.endowment.emplace_back(static_cast<Item>(it - inst.item_ids.begin()));
    }
    r.doc = value_json(eval_fixed_multibuyer_mechanism(inst, m));
  } else {
    throw InvalidInput("multibuyer: unknown --what \"" + opt.what + "\" (dsic|bic|ttc|serial)");
  }
  return r;
}

}  // namespace

CliResult run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Revenue of fixed-price selling mechanisms over ranked-list demand", "fixedprice"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--instance", opt.instance, "instance JSON file");
    sub->add_option("--what", opt.what, "what to solve or check");
    sub->add_option("--params", opt.params, "JSON text or file");
    sub->add_option("--tolerance", opt.tolerance, "tolerance for float-born checks (default 1e-9)");
    sub->add_option("--cap", opt.cap, "enumeration cap on the item count");
    sub->add_flag("--pretty", opt.pretty, "indent the JSON output");
  };
  auto* gen = app.add_subcommand("gen", "generate an instance from a choice model");
  add_common(gen);
  gen->add_option("--model", opt.model, "model name (mnl|markov|eba|nl3|nl4sym|mixture|topk-gap|random) or descriptor file");
  gen->add_option("--out", opt.out, "output file (default stdout)");
  auto* solve = app.add_subcommand("solve", "assortment|mech|f|bm|topk|policy");
  add_common(solve);
  auto* check = app.add_subcommand("check", "ic|history-monotone|submodular|containment");
  add_common(check);
  auto* compare = app.add_subcommand("compare", "compare LP optima");
  add_common(compare);
  compare->add_flag("--lps", opt.lps, "OPT^S, OPT^x and OPT^BM");
  auto* robust = app.add_subcommand("robust", "revenue of a menu under adversarial tie-breaking");
  add_common(robust);
  auto* multi = app.add_subcommand("multibuyer", "dsic|bic|ttc|serial");
  add_common(multi);

  CliResult result;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    result.out = app.help();
    return result;
  } catch (const CLI::ParseError& e) {
    result.exit_code = kExitError;
    result.err = std::string(e.what()) + "\n" + app.help();
    return result;
  }
  for (auto* sub : {gen, solve, check, compare, robust, multi}) {
    if (sub->get_option("--tolerance")->count() > 0) opt.tolerance_given = true;
  }

  try {
    Report r;
    if (*gen) {
      r = do_gen(opt);
    } else if (*solve) {
      r = do_solve(opt);
    } else if (*check) {
      r = do_check(opt);
    } else if (*compare) {
      r = do_compare(opt);
    } else if (*robust) {
      r = do_robust(opt);
    } else {
      r = do_multibuyer(opt);
    }
    result.out = dump_json(r.doc, opt.pretty) + "\n";
    result.exit_code = r.exit_code;
  } catch (const std::exception& e) {
    result.exit_code = kExitError;
    result.err = std::string("error: ") + e.what() + "\n";
  }
  return result;
}

}  // namespace fixedprice
