#include "fixtures.hpp"

namespace fixedprice::testing {

std::string fixture_path(const std::string& name) { return std::string(FIXEDPRICE_FIXTURE_DIR) + "/" + name; }

Json load_fixture_json(const std::string& name) {
  return parse_json_text(read_text_file(fixture_path(name)), name);
}

Instance load_fixture(const std::string& name) { return load_instance(fixture_path(name)); }

MultiBuyerInstance load_multibuyer_fixture(const std::string& name) { return load_multibuyer(fixture_path(name)); }

}  // namespace fixedprice::testing
