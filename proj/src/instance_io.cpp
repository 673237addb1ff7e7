#include "fixedprice/instance_io.hpp"

#include <fstream>
#include <sstream>

#include "fixedprice/errors.hpp"

namespace fixedprice {

Rational rational_from_json(const Json& value, const std::string& where) {
  if (value.is_number_integer()) {
    if (value.is_number_unsigned()) return Rational(std::to_string(value.get<std::uint64_t>()));
    return Rational(std::to_string(value.get<std::int64_t>()));
  }
  if (value.is_string()) {
    try {
      return parse_rational(value.get<std::string>());
    } catch (const InvalidInput& e) {
      throw InvalidInput(where + ": " + e.what());
    }
  }
  if (value.is_number_float()) {
    throw InvalidInput(where + ": non-integer JSON number " + value.dump() +
                       " is inexact; write it as a string such as \"0.25\" or \"1/4\"");
  }
  throw InvalidInput(where + ": expected a rational, got " + value.dump());
}

Json rational_to_json(const Rational& q) { return to_string(q); }

Json parse_json_text(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InvalidInput(std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(col) +
                       ": malformed JSON: " + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

const Json& member(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw InvalidInput(where + ": missing \"" + key + "\"");
  }
  return obj.at(key);
}

Item resolve(const Json& id, const std::vector<std::string>& item_ids, const std::string& where) {
  if (!id.is_string()) throw InvalidInput(where + ": item ids must be strings, got " + id.dump());
  const auto& s = id.get_ref<const std::string&>();
  for (std::size_t i = 0; i < item_ids.size(); ++i) {
    if (item_ids[i] == s) return static_cast<Item>(i);
  }
  throw InvalidInput(where + ": unknown item \"" + s + "\"");
}

}  // namespace

ListDistribution distribution_from_json(const Json& lists, const std::vector<std::string>& item_ids,
                                        const std::string& where) {
  if (!lists.is_array()) throw InvalidInput(where + ": expected an array of lists");
  ListDistribution dist;
  dist.item_count = static_cast<int>(item_ids.size());
  for (std::size_t i = 0; i < lists.size(); ++i) {
    std::string at = where + "/" + std::to_string(i);
    const Json& entry = lists[i];
    const Json& items = member(entry, "items", at);
    if (!items.is_array()) throw InvalidInput(at + "/items: expected an array");
    ListEntry e;
    for (std::size_t k = 0; k < items.size(); ++k) {
      e.list.push_back(resolve(items[k], item_ids, at + "/items/" + std::to_string(k)));
    }
    e.prob = rational_from_json(member(entry, "prob", at), at + "/prob");
    dist.entries.push_back(std::move(e));
  }
  auto report = validate_distribution(dist);
  if (!report.ok()) throw InvalidInput(where + ": " + report.summary());
  return dist;
}

Json distribution_to_json(const ListDistribution& dist, const std::vector<std::string>& item_ids) {
  Json lists = Json::array();
  for (const auto& e : canonical(dist).entries) {
    Json items = Json::array();
    for (Item j : e.list) items.push_back(item_ids.at(static_cast<std::size_t>(j)));
    lists.push_back(Json{{"items", items}, {"prob", rational_to_json(e.prob)}});
  }
  return lists;
}

Instance instance_from_json(const Json& doc) {
  if (!doc.is_object()) throw InvalidInput("instance: expected a JSON object");
  Instance inst;
  const Json& items = member(doc, "items", "instance");
  if (!items.is_array()) throw InvalidInput("/items: expected an array");
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::string at = "/items/" + std::to_string(i);
    const Json& id = member(items[i], "id", at);
    if (!id.is_string()) throw InvalidInput(at + "/id: expected a string");
    inst.item_ids.push_back(id.get<std::string>());
    inst.prices.push_back(rational_from_json(member(items[i], "price", at), at + "/price"));
  }
  if (inst.item_ids.size() > static_cast<std::size_t>(kMaxItems)) {
    throw InvalidInput("instance has " + std::to_string(inst.item_ids.size()) +
                       " items; at most " + std::to_string(kMaxItems) + " are supported");
  }
  inst.dist = distribution_from_json(member(doc, "lists", "instance"), inst.item_ids, "/lists");
  validate_instance(inst);
  return inst;
}

Instance parse_instance(std::string_view text) { return instance_from_json(parse_json_text(text)); }

Instance load_instance(const std::string& path) {
  try {
    return instance_from_json(parse_json_text(read_text_file(path), path));
  } catch (const InvalidInput& e) {
    std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw InvalidInput(path + ": " + msg);
  }
}

Json instance_to_json(const Instance& inst) {
  Json items = Json::array();
  for (std::size_t i = 0; i < inst.item_ids.size(); ++i) {
    items.push_back(Json{{"id", inst.item_ids[i]}, {"price", rational_to_json(inst.prices[i])}});
  }
  return Json{{"items", items}, {"lists", distribution_to_json(inst.dist, inst.item_ids)}};
}

std::string dump_json(const Json& doc, bool pretty) { return pretty ? doc.dump(2) : doc.dump(); }

std::string serialize_instance(const Instance& inst, bool pretty) {
  return dump_json(instance_to_json(inst), pretty);
}

}  // namespace fixedprice
