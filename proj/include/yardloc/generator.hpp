#pragma once

#include <cstdint>
#include <stdexcept>

#include "yardloc/instance.hpp"

namespace yardloc {

struct GeneratorSpec {
  int node_count = 6;
  double potential_fraction = 0.4;
  int plans_per_node = 2;
  double demand_density = 0.3;   // probability an ordered pair carries demand
  double capacity_slack = 2.0;   // headroom over the all-direct baseline
  std::uint64_t rng_seed = 0;
};

struct GeneratorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Emits a valid instance whose all-direct service plan is feasible;
// capacity_slack > 1 leaves room for reclassification routings. Identical
// spec and seed produce identical instances, byte for byte.
Instance generate_instance(const GeneratorSpec& spec);

}  // namespace yardloc
