#pragma once

#include <json.hpp>
#include <string>
#include <string_view>

#include "fixedprice/core_model.hpp"

namespace fixedprice {

using Json = nlohmann::json;

// Rationals appear in JSON as integers, decimal strings or "a/b" strings.
Rational rational_from_json(const Json& value, const std::string& where);
// Always written as a string so output is byte-stable.
Json rational_to_json(const Rational& q);

// Parses JSON text; syntax errors report line and column.
Json parse_json_text(std::string_view text, std::string_view source = "input");
std::string read_text_file(const std::string& path);

// Lists given as [{"items":[ids...],"prob":r}, ...]; ids resolved against item_ids.
ListDistribution distribution_from_json(const Json& lists, const std::vector<std::string>& item_ids,
                                        const std::string& where);
Json distribution_to_json(const ListDistribution& dist, const std::vector<std::string>& item_ids);

// {"items":[{"id":..,"price":..}],"lists":[...]}
Instance instance_from_json(const Json& doc);
Instance parse_instance(std::string_view text);
Instance load_instance(const std::string& path);

// Canonical form: lists sorted by length then item order.
Json instance_to_json(const Instance& inst);
std::string serialize_instance(const Instance& inst, bool pretty = false);

std::string dump_json(const Json& doc, bool pretty);

}  // namespace fixedprice
