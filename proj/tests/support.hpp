#pragma once

#include <string>
#include <vector>

#include "yardloc/instance.hpp"

namespace yardloc::testsupport {

inline Node yard(const std::string& id, double c, double tau, double cap_total,
                 int tracks_total, double cap_local = 0, int tracks_local = 0) {
  Node n;
  n.id = id;
  n.is_original_yard = true;
  n.attrs = {c, cap_total, cap_local, tracks_total, tracks_local, tau};
  return n;
}

// Three yards on a line, one relay-worthy demand A->C plus local traffic.
// With ample capacity the relay routing through B wins 1200 vs 1500
// car-hours per day.
inline Instance line3(double cap_b = 500.0) {
  Instance inst;
  inst.nodes = {yard("A", 10, 2, 500, 4), yard("B", 10, 2, cap_b, 4),
                yard("C", 10, 2, 500, 4)};
  inst.itineraries[{"A", "B"}] = {};
  inst.itineraries[{"B", "C"}] = {};
  inst.itineraries[{"A", "C"}] = {"B"};
  inst.demands = {{"A", "C", 100}, {"A", "B", 50}, {"B", "C", 70}};
  inst.economics.budget = 0;
  inst.economics.discount_rate = 0.1;
  inst.economics.car_hour_value = 1.0;
  inst.economics.train_size_default = 50;
  inst.economics.track_fn = {TrackFn::Kind::Step, {}};
  inst.finalize();
  return inst;
}

}  // namespace yardloc::testsupport
