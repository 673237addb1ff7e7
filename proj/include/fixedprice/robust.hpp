#pragma once

#include <vector>

#include "fixedprice/mechanism.hpp"

namespace fixedprice {

// Lottery over {no purchase} and the items.
struct MenuEntry {
  Rational none;
  std::vector<Rational> items;

  bool operator==(const MenuEntry&) const = default;
};

// A menu must contain the all-no-purchase entry.
struct Menu {
  std::vector<MenuEntry> entries;
};

void validate_menu(const Menu& menu, int item_count);

// Every list's allocation, with leftover mass on no purchase, plus the zero
// entry; duplicates removed.
Menu mechanism_to_menu(const Instance& inst, const Mechanism& m);

// Entries some utility strictly consistent with the list picks as a
// favorite. Each candidate is tested with an LP maximizing the strictness
// margin over utilities in a box.
std::vector<std::size_t> exposable_entries(const Instance& inst, const Menu& menu, const RankedList& list);

// Expected revenue when each buyer picks the worst exposable entry.
Rational robust_revenue(const Instance& inst, const Menu& menu);

// {"entries":[{"alloc":{"0":r,"id":r}}]}
Json menu_to_json(const Instance& inst, const Menu& menu);
Menu menu_from_json(const Instance& inst, const Json& doc);

}  // namespace fixedprice
