#pragma once

#include <string>

#include "fixedprice/instance_io.hpp"
#include "fixedprice/multibuyer.hpp"

namespace fixedprice::testing {

std::string fixture_path(const std::string& name);
Json load_fixture_json(const std::string& name);
Instance load_fixture(const std::string& name);
MultiBuyerInstance load_multibuyer_fixture(const std::string& name);

}  // namespace fixedprice::testing
