#pragma once

#include <stdexcept>

#include "yardloc/instance.hpp"

namespace yardloc {

struct ItineraryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fills the itinerary map from the physical edge list: shortest path by
// total edge length, ties broken by the lexicographically smallest node-id
// sequence. Explicit itineraries already present are never overwritten.
// Routes are derived for every connected ordered pair so relay legs are
// covered too, not just the demand pairs.
// Throws ItineraryError on negative edge lengths or when a demand pair is
// disconnected.
void derive_itineraries(Instance& inst);

}  // namespace yardloc
