#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "yardloc/instance.hpp"

namespace yardloc {

// Ordered (origin, destination) node-index pair.
using NodePair = std::pair<int, int>;

// One chosen plan index per potential node; 0 means no investment, p >= 1
// selects the p-th stored plan.
struct InvestmentDecision {
  std::map<NodeId, int> choice;

  bool operator==(const InvestmentDecision&) const = default;

  // Canonical "id:plan,id:plan" rendering in id order.
  std::string to_string() const;
};

// Throws std::invalid_argument unless the decision names exactly the
// potential nodes and every plan index is within range.
void check_decision(const Instance& inst, const InvestmentDecision& decision);

// An instance plus an investment decision, with the per-node attributes the
// decision puts into effect: usable classification capacity, usable tracks,
// and the per-car reclassification cost.
struct Scenario {
  const Instance* instance = nullptr;
  InvestmentDecision decision;
  std::vector<double> effective_capacity;  // per node index
  std::vector<double> effective_tracks;
  std::vector<double> effective_tau;
};

Scenario make_scenario(const Instance& inst, const InvestmentDecision& decision);

// Per-pair routing choice: ship straight to the destination or hand the
// cars to one intermediate yard from the pair's itinerary, which then
// routes them onward under its own pair choice.
struct RouteChoice {
  int via = -1;  // -1 = direct, otherwise node index of the relay yard

  bool is_direct() const { return via < 0; }
  static RouteChoice direct() { return {}; }
  static RouteChoice via_yard(int k) { return {k}; }
  bool operator==(const RouteChoice&) const = default;
  auto operator<=>(const RouteChoice&) const = default;
};

struct TcsAssignment {
  std::map<NodePair, RouteChoice> route;

  const RouteChoice* find(int i, int j) const {
    auto it = route.find({i, j});
    return it == route.end() ? nullptr : &it->second;
  }
  void set_direct(int i, int j) { route[{i, j}] = RouteChoice::direct(); }
  void set_via(int i, int j, int k) { route[{i, j}] = RouteChoice::via_yard(k); }

  bool operator==(const TcsAssignment&) const = default;
};

struct FlowError : std::runtime_error {
  enum class Kind { RoutingCycle, UnassignedPair };
  Kind kind;
  NodePair pair;
  FlowError(Kind k, NodePair p, const std::string& msg)
      : std::runtime_error(msg), kind(k), pair(p) {}
};

// Flows induced by an assignment. f: cars moved per origin-destination pair
// (demand plus cars relayed in from upstream yards); workload: cars
// reclassified per yard; service_flow: cars riding each provided train
// service. Only strictly positive entries are stored.
struct FlowState {
  std::map<NodePair, double> f;
  std::vector<double> workload;              // indexed by node
  std::map<NodePair, double> service_flow;   // D
  std::set<NodePair> provided_services;

  double flow(int i, int j) const {
    auto it = f.find({i, j});
    return it == f.end() ? 0.0 : it->second;
  }
  double service(int i, int j) const {
    auto it = service_flow.find({i, j});
    return it == service_flow.end() ? 0.0 : it->second;
  }

  bool operator==(const FlowState&) const = default;
};

// Resolves the flow recursion per destination by walking each relay chain;
// throws FlowError on a relay cycle or on a flow-bearing pair with no route
// entry. Deterministic: all accumulation runs in node-id order.
FlowState compute_flows(const Scenario& scenario, const TcsAssignment& assignment);

struct TrackOverflowError : std::runtime_error {
  double demand;
  TrackOverflowError(double d, const std::string& msg)
      : std::runtime_error(msg), demand(d) {}
};

// Tracks needed to host a daily service flow. Linear: flow/200, possibly
// fractional. Step: smallest rung whose threshold covers the flow, zero for
// zero flow; throws TrackOverflowError when an explicitly configured ladder
// is exceeded.
double track_demand(double service_flow, const TrackFn& fn);

struct FeasibilityViolation {
  enum class Kind { CapacityExceeded, TracksExceeded, RoutingCycle };
  Kind kind;
  int node = -1;        // yard in violation (capacity/tracks)
  NodePair pair{-1, -1};
  double lhs = 0.0;
  double rhs = 0.0;
};

struct FeasibilityReport {
  std::vector<FeasibilityViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Workload vs effective capacity per yard, summed track demand vs effective
// tracks per origin. A service flow beyond a finite track ladder is
// reported as a track violation with infinite demand.
FeasibilityReport check_feasibility(const Scenario& scenario,
                                    const TcsAssignment& assignment,
                                    const FlowState& flows);

struct CostBreakdown {
  double accumulation = 0.0;       // car-hours/day gathering full trains
  double reclassification = 0.0;   // car-hours/day sorting cars at yards
  double z_total = 0.0;

  bool operator==(const CostBreakdown&) const = default;
};

// Daily operating cost: one accumulation charge c_origin * train_size per
// provided service, plus workload * effective reclassification cost per
// yard.
CostBreakdown operating_cost(const Scenario& scenario, const FlowState& flows);

// Decision-independent routing universe: every pair that can carry flow
// (demand pairs plus all pairs reachable by relaying through itinerary
// yards), each with its relay options. Pairs and options are sorted by
// node-id rank, which fixes enumeration and tie-break order.
struct PairClosure {
  std::vector<NodePair> pairs;
  std::map<NodePair, std::vector<int>> vias;
  std::map<NodePair, double> demand;  // aggregated volume per demand pair

  int pair_count() const { return static_cast<int>(pairs.size()); }
};

PairClosure build_closure(const Instance& inst);

std::string assignment_to_string(const Instance& inst, const TcsAssignment& assignment);

std::string violation_to_string(const Instance& inst, const FeasibilityViolation& v);

}  // namespace yardloc
