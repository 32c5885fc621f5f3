#pragma once

#include <string>
#include <vector>

#include "yardloc/instance.hpp"

namespace yardloc {

struct Violation {
  std::string rule;      // stable rule id, e.g. "itin.contains_endpoint"
  std::string location;  // node id, pair, or section the violation sits in
  std::string detail;
};

// Violations are data, not failures: an empty violation list means every
// structural invariant holds and every demand is routable. Warnings flag
// permitted-but-unusual data and do not affect validity.
struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<Violation> warnings;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate_instance(const Instance& inst);

}  // namespace yardloc
