#pragma once

#include <stdexcept>
#include <string>

#include "yardloc/instance.hpp"

namespace yardloc {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses the yardloc instance document. Cross-references (node ids in
// edges, itineraries, demands, overrides) are checked here; semantic
// invariants are the job of validate_instance.
Instance parse_instance(const std::string& text);

// Deterministic rendering: stable key order, shortest round-trip decimals.
// parse_instance(serialize_instance(x)) == x for every valid Instance.
std::string serialize_instance(const Instance& inst);

Instance read_instance_file(const std::string& path);
void write_instance_file(const Instance& inst, const std::string& path);

// parse + validate + derive missing itineraries; throws ParseError carrying
// the first violation when the file is structurally sound but invalid.
Instance load_instance(const std::string& text);
Instance load_instance_file(const std::string& path);

}  // namespace yardloc
