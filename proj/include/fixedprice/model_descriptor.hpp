#pragma once

#include <cstdint>

#include "fixedprice/instance_io.hpp"

namespace fixedprice {

// Builds an instance from a model descriptor such as
//   {"model":"mnl","items":[{"id":"A","price":"2"}],"weights":{"A":"1"},"no_purchase_weight":"1"}
// Supported models: mnl, markov, eba, nl3, nl4sym, mixture, topk-gap, random.
Instance instance_from_model(const Json& descriptor, std::uint64_t seed = 0);

}  // namespace fixedprice
