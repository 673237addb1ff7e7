#pragma once

#include <optional>
#include <vector>

#include "fixedprice/instance_io.hpp"
#include "fixedprice/rational_lp.hpp"

namespace fixedprice {

// Several buyers with independent list distributions over shared items, one
// unit of each item.
struct MultiBuyerInstance {
  std::vector<std::string> item_ids;
  std::vector<Rational> prices;
  std::vector<ListDistribution> buyers;

  int item_count() const { return static_cast<int>(item_ids.size()); }
  const Rational& price(Item j) const { return prices.at(static_cast<std::size_t>(j)); }
};

void validate_multibuyer(const MultiBuyerInstance& inst);

// A report profile: one distribution entry index per buyer.
using Profile = std::vector<std::size_t>;

inline constexpr std::size_t kMaxProfiles = 100000;

std::vector<Profile> enumerate_profiles(const MultiBuyerInstance& inst);
Rational profile_probability(const MultiBuyerInstance& inst, const Profile& profile);

enum class IncentiveMode { DominantStrategy, Bayesian };

struct MultiBuyerLP {
  RationalLP lp;
  std::vector<Profile> profiles;
  // var_of[p][i][k]: buyer i gets the k-th item of their list in profile p.
  std::vector<std::vector<std::vector<int>>> var_of;
};

MultiBuyerLP build_multibuyer_lp(const MultiBuyerInstance& inst, IncentiveMode mode);
Rational solve_multibuyer_lp(const MultiBuyerInstance& inst, IncentiveMode mode);

// Deterministic allocation for a profile: the item each buyer receives.
using Assignment = std::vector<std::optional<Item>>;

// Buyers in `order` take their favorite remaining item.
Assignment serial_dictatorship(const MultiBuyerInstance& inst, const std::vector<const RankedList*>& lists,
                               const std::vector<std::size_t>& order);

// Trading among owners: each buyer points at the owner of their favorite
// remaining item and cycles trade. A buyer with no acceptable item left
// leaves empty-handed and their item goes unsold. endowment[i] is buyer i's
// item; every item needs exactly one owner.
Assignment top_trading_cycles(const MultiBuyerInstance& inst, const std::vector<const RankedList*>& lists,
                              const std::vector<std::optional<Item>>& endowment);

struct FixedMechanism {
  enum class Kind { SerialDictatorship, TopTradingCycles } kind = Kind::SerialDictatorship;
  std::vector<std::size_t> order;                 // serial dictatorship
  std::vector<std::optional<Item>> endowment;     // top trading cycles
};

Rational eval_fixed_multibuyer_mechanism(const MultiBuyerInstance& inst, const FixedMechanism& mechanism);

// {"items":[...],"buyers":[{"lists":[...]}, ...]}
MultiBuyerInstance multibuyer_from_json(const Json& doc);
MultiBuyerInstance load_multibuyer(const std::string& path);
Json multibuyer_to_json(const MultiBuyerInstance& inst);

}  // namespace fixedprice
