#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "yardloc/util.hpp"

namespace yardloc {

using NodeId = std::string;

// Car-hours per train slot at a yard, classification capacity and track
// counts before any investment. A candidate site that is not yet a yard
// carries all-zero capacity and tracks.
struct YardAttributes {
  double accumulation_param = 0.0;  // car-hours per train formed
  double capacity_total = 0.0;      // railcars/day
  double capacity_local = 0.0;      // railcars/day reserved for local trains
  int tracks_total = 0;
  int tracks_local = 0;
  double reclass_cost = 0.0;        // car-hours per railcar

  bool operator==(const YardAttributes&) const = default;
};

// One building/improvement option. The "do nothing" option is implicit
// (plan index 0, zero cost) and never stored.
struct InvestmentPlan {
  double cost = 0.0;
  int lifetime_years = 1;
  double reclass_cost_after = 0.0;
  double capacity_gain = 0.0;
  int tracks_gain = 0;

  bool operator==(const InvestmentPlan&) const = default;
};

struct Node {
  NodeId id;
  bool is_original_yard = false;
  bool is_potential = false;
  YardAttributes attrs;
  std::vector<InvestmentPlan> plans;  // empty unless is_potential

  bool operator==(const Node&) const = default;
};

struct Demand {
  NodeId origin;
  NodeId destination;
  double volume = 0.0;  // railcars/day

  bool operator==(const Demand&) const = default;
};

struct PhysicalEdge {
  NodeId a;
  NodeId b;
  double length = 0.0;

  bool operator==(const PhysicalEdge&) const = default;
};

// Track demand function: either proportional (may be fractional) or
// stepwise, one more track per threshold crossed. An empty threshold list
// means the unbounded default ladder 200, 400, 600, ...
struct TrackFn {
  enum class Kind { Linear, Step };
  Kind kind = Kind::Step;
  std::vector<double> thresholds;

  bool operator==(const TrackFn&) const = default;
};

struct EconomicParams {
  double budget = 0.0;
  double discount_rate = 0.1;          // per year, in (0,1)
  double car_hour_value = 1.0;         // currency per car-hour
  int day_count = 365;                 // operating days charged per year
  double train_size_default = 50.0;    // railcars
  std::map<std::pair<NodeId, NodeId>, double> train_size_overrides;
  TrackFn track_fn;

  bool operator==(const EconomicParams&) const = default;
};

using ItineraryKey = std::pair<NodeId, NodeId>;

// Immutable problem description. After construction it is shared read-only
// across solver workers.
struct Instance {
  std::vector<Node> nodes;
  std::vector<PhysicalEdge> edges;
  // (origin, destination) -> intermediate yards in travel order, endpoints
  // excluded. Empty vector = adjacent pair, direct service only.
  std::map<ItineraryKey, std::vector<NodeId>> itineraries;
  std::vector<Demand> demands;
  EconomicParams economics;

  bool operator==(const Instance& o) const {
    return nodes == o.nodes && edges == o.edges && itineraries == o.itineraries &&
           demands == o.demands && economics == o.economics;
  }

  // Derived lookup state, rebuilt by finalize(); not part of value identity.
  std::map<NodeId, int> index;        // id -> position in nodes
  std::vector<int> rank;              // rank[idx] = position of idx in id-sorted order
  std::vector<int> by_rank;           // inverse permutation of rank

  void finalize();

  int index_of(const NodeId& id) const {
    auto it = index.find(id);
    return it == index.end() ? -1 : it->second;
  }

  const Node& node(int idx) const { return nodes[static_cast<size_t>(idx)]; }
  int node_count() const { return static_cast<int>(nodes.size()); }

  double train_size(const NodeId& from, const NodeId& to) const {
    auto it = economics.train_size_overrides.find({from, to});
    return it == economics.train_size_overrides.end() ? economics.train_size_default
                                                      : it->second;
  }

  const std::vector<NodeId>* itinerary(const NodeId& from, const NodeId& to) const {
    auto it = itineraries.find({from, to});
    return it == itineraries.end() ? nullptr : &it->second;
  }

  int potential_count() const {
    int c = 0;
    for (const auto& n : nodes) c += n.is_potential ? 1 : 0;
    return c;
  }
};

struct CountOverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Number of distinct investment decisions: product over potential nodes of
// the per-node option count. include_no_invest adds the do-nothing option
// to each node's count. Empty product is 1.
u128 count_investment_combinations(const Instance& inst, bool include_no_invest);

}  // namespace yardloc
