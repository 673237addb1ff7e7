#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fixedprice/core_model.hpp"
#include "fixedprice/instance_io.hpp"
#include "fixedprice/rational_lp.hpp"

namespace fixedprice {

// alloc[i][k] is the probability that a buyer reporting list i of the
// instance's distribution receives the k-th item of that list.
struct Mechanism {
  std::vector<std::vector<Rational>> alloc;
};

Mechanism zero_mechanism(const Instance& inst);
Rational mechanism_revenue(const Instance& inst, const Mechanism& m);

// Values f(S) for every subset S, indexed by bitmask.
struct SetFunction {
  int item_count = 0;
  std::vector<Rational> values;

  explicit SetFunction(int n = 0) : item_count(n), values(std::size_t{1} << n) {}
  Rational& operator[](ItemSet s) { return values.at(s.mask()); }
  const Rational& operator[](ItemSet s) const { return values.at(s.mask()); }
};

// Sum over realizable prefixes of price(endpoint) * (f(prefix) - f(body)) * Pr[prefix].
Rational set_function_revenue(const Instance& inst, const SetFunction& f);

struct MechanismLP {
  RationalLP lp;
  std::vector<std::vector<int>> var_of;  // var_of[i][k] matches Mechanism::alloc
};

// Variables x_j(list) for items on each list; one incentive row for every
// (list, prefix length, other list); a unit-sum row per list.
MechanismLP build_mechanism_lp(const Instance& inst);

struct MechanismOptimum {
  LpSolution solution;
  Mechanism mechanism;
  const Rational& value() const { return solution.value; }
};

MechanismOptimum solve_mechanism_lp(const Instance& inst);
Mechanism mechanism_from_values(const MechanismLP& mlp, const std::vector<Rational>& values);

struct IcViolation {
  std::size_t list;   // reporting truthfully with this list ...
  std::size_t depth;  // ... the top `depth` items ...
  std::size_t other;  // ... are worth less than reporting this list
  Rational shortfall;
};

struct IcReport {
  std::vector<IcViolation> violations;
  std::vector<std::string> feasibility_problems;  // negative entries, sums above 1
  bool ok() const { return violations.empty() && feasibility_problems.empty(); }
};

IcReport verify_ic(const Instance& inst, const Mechanism& m);

Mechanism assortment_to_mechanism(const Instance& inst, ItemSet assortment);

inline constexpr int kMaxSetFunctionItems = 16;

// f(S) = max over lists of the allocation mass the list places on S. Throws
// InvalidInput when the mechanism is not recovered from f, which only
// happens for mechanisms that are not incentive compatible.
SetFunction mechanism_to_set_function(const Instance& inst, const Mechanism& m);

struct SubmodularityWitness {
  ItemSet base;
  Item first;
  Item second;
};

std::optional<SubmodularityWitness> find_submodularity_violation(const SetFunction& f);
// Returns (S, j) with f(S + j) < f(S).
std::optional<std::pair<ItemSet, Item>> find_monotonicity_violation(const SetFunction& f);

// x_{list,k} = f(list[0..k]) - f(list[0..k-1]). Requires f monotone,
// submodular, f(empty) = 0 and values in [0,1].
Mechanism submodular_to_mechanism(const Instance& inst, const SetFunction& f);

inline constexpr int kMaxSetFunctionLpItems = 12;

// One variable per subset in [0,1], f(empty) fixed to 0, monotone rows.
// Variable index equals the subset bitmask.
RationalLP build_set_function_lp(const Instance& inst);

struct SetFunctionOptimum {
  LpSolution solution;
  SetFunction f;
  const Rational& value() const { return solution.value; }
};

SetFunctionOptimum solve_set_function_lp(const Instance& inst);

struct BmLP {
  RationalLP lp;
  std::vector<std::vector<int>> var_of;
  std::vector<int> z_var;  // one per item
};

// Relaxation with per-item inclusion variables z: x <= z, items after k on a
// list get at most 1 - z of the k-th item, and a unit-sum row per list.
BmLP build_bm_lp(const Instance& inst);
LpSolution solve_bm_lp(const Instance& inst);

struct ContainmentWitness {
  std::vector<Rational> inclusion;      // z_j = max over lists of x_j(list)
  std::vector<std::string> violations;  // relaxation rows that fail
  bool ok() const { return violations.empty(); }
};

ContainmentWitness containment_witness(const Instance& inst, const Mechanism& m);

// {"alloc":[{"list":[ids],"probs":{"id":r}}]}; lists absent from the JSON
// allocate nothing.
Json mechanism_to_json(const Instance& inst, const Mechanism& m);
Mechanism mechanism_from_json(const Instance& inst, const Json& doc);

}  // namespace fixedprice
