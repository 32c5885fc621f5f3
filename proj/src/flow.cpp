#include "yardloc/flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace yardloc {

namespace {

// Absolute guard against float drift in sums compared to exact bounds.
constexpr double kFeasEps = 1e-9;

std::vector<int> rank_sorted_nodes(const Instance& inst) { return inst.by_rank; }

std::vector<NodePair> rank_sorted_pairs(const Instance& inst,
                                        std::vector<NodePair> pairs) {
  std::sort(pairs.begin(), pairs.end(), [&](const NodePair& a, const NodePair& b) {
    auto ka = std::make_pair(inst.rank[static_cast<size_t>(a.first)],
                             inst.rank[static_cast<size_t>(a.second)]);
    auto kb = std::make_pair(inst.rank[static_cast<size_t>(b.first)],
                             inst.rank[static_cast<size_t>(b.second)]);
    return ka < kb;
  });
  return pairs;
}

}  // namespace

std::string InvestmentDecision::to_string() const {
  std::string s;
  for (const auto& [id, plan] : choice) {
    if (!s.empty()) s += ",";
    s += id + ":" + std::to_string(plan);
  }
  return s.empty() ? "-" : s;
}

void check_decision(const Instance& inst, const InvestmentDecision& decision) {
  size_t potential_seen = 0;
  for (const auto& n : inst.nodes) {
    if (!n.is_potential) {
      if (decision.choice.count(n.id))
        throw std::invalid_argument("decision names non-potential node '" + n.id + "'");
      continue;
    }
    ++potential_seen;
    auto it = decision.choice.find(n.id);
    if (it == decision.choice.end())
      throw std::invalid_argument("decision is missing potential node '" + n.id + "'");
    if (it->second < 0 || it->second > static_cast<int>(n.plans.size()))
      throw std::invalid_argument("plan index " + std::to_string(it->second) +
                                  " out of range for node '" + n.id + "'");
  }
  if (decision.choice.size() != potential_seen)
    throw std::invalid_argument("decision names nodes outside the instance");
}

Scenario make_scenario(const Instance& inst, const InvestmentDecision& decision) {
  check_decision(inst, decision);
  Scenario s;
  s.instance = &inst;
  s.decision = decision;
  const int n = inst.node_count();
  s.effective_capacity.resize(static_cast<size_t>(n));
  s.effective_tracks.resize(static_cast<size_t>(n));
  s.effective_tau.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Node& node = inst.node(i);
    double cap = node.attrs.capacity_total - node.attrs.capacity_local;
    double tracks = node.attrs.tracks_total - node.attrs.tracks_local;
    double tau = node.attrs.reclass_cost;
    if (node.is_potential) {
      int p = decision.choice.at(node.id);
      if (p >= 1) {
        const InvestmentPlan& plan = node.plans[static_cast<size_t>(p - 1)];
        cap += plan.capacity_gain;
        tracks += plan.tracks_gain;
        tau = plan.reclass_cost_after;
      }
    }
    s.effective_capacity[static_cast<size_t>(i)] = cap;
    s.effective_tracks[static_cast<size_t>(i)] = tracks;
    s.effective_tau[static_cast<size_t>(i)] = tau;
  }
  return s;
}

FlowState compute_flows(const Scenario& scenario, const TcsAssignment& assignment) {
  const Instance& inst = *scenario.instance;
  const int n = inst.node_count();
  FlowState fs;
  fs.workload.assign(static_cast<size_t>(n), 0.0);

  // Demand grouped by destination, everything iterated in node-id order so
  // every float accumulation has one fixed order.
  std::vector<std::map<int, double>> demand_to(static_cast<size_t>(n));
  std::vector<int> dests;
  for (const auto& d : inst.demands) {
    if (!(d.volume > 0)) continue;
    int io = inst.index_of(d.origin), id = inst.index_of(d.destination);
    auto& m = demand_to[static_cast<size_t>(id)];
    if (m.empty()) dests.push_back(id);
    m[io] += d.volume;
  }
  std::sort(dests.begin(), dests.end(), [&](int a, int b) {
    return inst.rank[static_cast<size_t>(a)] < inst.rank[static_cast<size_t>(b)];
  });

  for (int j : dests) {
    std::vector<int> sources;
    for (const auto& [i, v] : demand_to[static_cast<size_t>(j)]) sources.push_back(i);
    std::sort(sources.begin(), sources.end(), [&](int a, int b) {
      return inst.rank[static_cast<size_t>(a)] < inst.rank[static_cast<size_t>(b)];
    });

    // Discover every node that carries flow toward j by walking the relay
    // chains; a chain must end in a direct dispatch.
    std::vector<char> active(static_cast<size_t>(n), 0);
    for (int s : sources) {
      std::vector<char> on_walk(static_cast<size_t>(n), 0);
      int cur = s;
      while (!active[static_cast<size_t>(cur)]) {
        if (on_walk[static_cast<size_t>(cur)])
          throw FlowError(FlowError::Kind::RoutingCycle, {cur, j},
                          "relay cycle toward " + inst.node(j).id + " at " + inst.node(cur).id);
        on_walk[static_cast<size_t>(cur)] = 1;
        const RouteChoice* rc = assignment.find(cur, j);
        if (!rc)
          throw FlowError(FlowError::Kind::UnassignedPair, {cur, j},
                          "pair " + inst.node(cur).id + "->" + inst.node(j).id +
                              " carries flow but has no route");
        if (rc->is_direct()) break;
        if (rc->via == j)
          throw std::invalid_argument("relay target equals destination " + inst.node(j).id);
        cur = rc->via;
      }
      for (int i = 0; i < n; ++i)
        if (on_walk[static_cast<size_t>(i)]) active[static_cast<size_t>(i)] = 1;
    }

    std::vector<int> active_nodes;
    for (int r = 0; r < n; ++r) {
      int i = inst.by_rank[static_cast<size_t>(r)];
      if (active[static_cast<size_t>(i)]) active_nodes.push_back(i);
    }

    // Relay predecessors, kept in id order so each node's inflow sums in a
    // fixed order; then one pass in dependency order.
    std::vector<std::vector<int>> preds(static_cast<size_t>(n));
    std::vector<int> pending(static_cast<size_t>(n), 0);
    for (int i : active_nodes) {
      const RouteChoice* rc = assignment.find(i, j);
      if (!rc->is_direct()) {
        preds[static_cast<size_t>(rc->via)].push_back(i);
        ++pending[static_cast<size_t>(rc->via)];
      }
    }
    std::vector<double> fj(static_cast<size_t>(n), 0.0);
    std::deque<int> ready;
    for (int i : active_nodes)
      if (pending[static_cast<size_t>(i)] == 0) ready.push_back(i);
    while (!ready.empty()) {
      int i = ready.front();
      ready.pop_front();
      double v = 0.0;
      auto it = demand_to[static_cast<size_t>(j)].find(i);
      if (it != demand_to[static_cast<size_t>(j)].end()) v = it->second;
      for (int s : preds[static_cast<size_t>(i)]) v += fj[static_cast<size_t>(s)];
      fj[static_cast<size_t>(i)] = v;
      const RouteChoice* rc = assignment.find(i, j);
      if (!rc->is_direct() && --pending[static_cast<size_t>(rc->via)] == 0)
        ready.push_back(rc->via);
    }

    for (int i : active_nodes) {
      double v = fj[static_cast<size_t>(i)];
      if (!(v > 0)) continue;
      fs.f[{i, j}] = v;
      const RouteChoice* rc = assignment.find(i, j);
      if (rc->is_direct()) {
        fs.service_flow[{i, j}] += v;
      } else {
        fs.workload[static_cast<size_t>(rc->via)] += v;
        fs.service_flow[{i, rc->via}] += v;
      }
    }
  }

  for (const auto& [pair, v] : fs.service_flow)
    if (v > 0) fs.provided_services.insert(pair);

  return fs;
}

double track_demand(double service_flow, const TrackFn& fn) {
  if (service_flow < 0) throw std::invalid_argument("service flow must be >= 0");
  if (fn.kind == TrackFn::Kind::Linear) return service_flow / 200.0;
  if (!(service_flow > 0)) return 0.0;
  if (fn.thresholds.empty()) return std::ceil(service_flow / 200.0);  // default rungs 200n
  for (size_t i = 0; i < fn.thresholds.size(); ++i)
    if (service_flow <= fn.thresholds[i]) return static_cast<double>(i + 1);
  throw TrackOverflowError(service_flow, "service flow " + format_number(service_flow) +
                                             " exceeds the largest track threshold " +
                                             format_number(fn.thresholds.back()));
}

FeasibilityReport check_feasibility(const Scenario& scenario, const TcsAssignment& assignment,
                                    const FlowState& flows) {
  const Instance& inst = *scenario.instance;
  FeasibilityReport rep;

  // One route per pair is structural; re-assert the relay-membership half.
  for (const auto& [pair, rc] : assignment.route) {
    if (rc.is_direct()) continue;
    const auto* via = inst.itinerary(inst.node(pair.first).id, inst.node(pair.second).id);
    bool member = false;
    if (via) {
      const NodeId& k = inst.node(rc.via).id;
      member = std::find(via->begin(), via->end(), k) != via->end();
    }
    if (!member)
      throw std::invalid_argument("route " + inst.node(pair.first).id + "->" +
                                  inst.node(pair.second).id + " relays through a yard not on its itinerary");
  }

  for (int k : rank_sorted_nodes(inst)) {
    double lhs = flows.workload[static_cast<size_t>(k)];
    double rhs = scenario.effective_capacity[static_cast<size_t>(k)];
    if (lhs > rhs + kFeasEps)
      rep.violations.push_back(
          {FeasibilityViolation::Kind::CapacityExceeded, k, {-1, -1}, lhs, rhs});
  }

  std::vector<NodePair> services = rank_sorted_pairs(
      inst, std::vector<NodePair>(flows.provided_services.begin(), flows.provided_services.end()));
  std::vector<double> tracks_used(inst.nodes.size(), 0.0);
  std::vector<char> overflowed(inst.nodes.size(), 0);
  for (const auto& [i, j] : services) {
    try {
      tracks_used[static_cast<size_t>(i)] += track_demand(flows.service(i, j),
                                                          inst.economics.track_fn);
    } catch (const TrackOverflowError&) {
      // Beyond the configured ladder no track count can host the service.
      overflowed[static_cast<size_t>(i)] = 1;
    }
  }
  for (int i : rank_sorted_nodes(inst)) {
    double lhs = overflowed[static_cast<size_t>(i)]
                     ? std::numeric_limits<double>::infinity()
                     : tracks_used[static_cast<size_t>(i)];
    double rhs = scenario.effective_tracks[static_cast<size_t>(i)];
    if (lhs > rhs + kFeasEps)
      rep.violations.push_back(
          {FeasibilityViolation::Kind::TracksExceeded, i, {-1, -1}, lhs, rhs});
  }

  return rep;
}

CostBreakdown operating_cost(const Scenario& scenario, const FlowState& flows) {
  const Instance& inst = *scenario.instance;
  CostBreakdown cb;
  std::vector<NodePair> services = rank_sorted_pairs(
      inst, std::vector<NodePair>(flows.provided_services.begin(), flows.provided_services.end()));
  for (const auto& [i, j] : services)
    cb.accumulation += inst.node(i).attrs.accumulation_param *
                       inst.train_size(inst.node(i).id, inst.node(j).id);
  for (int k : rank_sorted_nodes(inst))
    cb.reclassification +=
        flows.workload[static_cast<size_t>(k)] * scenario.effective_tau[static_cast<size_t>(k)];
  cb.z_total = cb.accumulation + cb.reclassification;
  return cb;
}

PairClosure build_closure(const Instance& inst) {
  PairClosure c;
  for (const auto& d : inst.demands) {
    if (!(d.volume > 0)) continue;
    c.demand[{inst.index_of(d.origin), inst.index_of(d.destination)}] += d.volume;
  }

  std::set<NodePair> seen;
  std::deque<NodePair> work;
  std::vector<NodePair> demand_pairs;
  for (const auto& [pair, v] : c.demand) demand_pairs.push_back(pair);
  for (const auto& pair : rank_sorted_pairs(inst, demand_pairs))
    if (seen.insert(pair).second) work.push_back(pair);

  while (!work.empty()) {
    NodePair pair = work.front();
    work.pop_front();
    std::vector<int> vias;
    const auto* via_ids =
        inst.itinerary(inst.node(pair.first).id, inst.node(pair.second).id);
    if (via_ids) {
      for (const auto& id : *via_ids) vias.push_back(inst.index_of(id));
      std::sort(vias.begin(), vias.end(), [&](int a, int b) {
        return inst.rank[static_cast<size_t>(a)] < inst.rank[static_cast<size_t>(b)];
      });
      vias.erase(std::unique(vias.begin(), vias.end()), vias.end());
    }
    for (int k : vias) {
      NodePair induced{k, pair.second};
      if (seen.insert(induced).second) work.push_back(induced);
    }
    c.vias.emplace(pair, std::move(vias));
  }

  c.pairs = rank_sorted_pairs(inst, std::vector<NodePair>(seen.begin(), seen.end()));
  return c;
}

std::string violation_to_string(const Instance& inst, const FeasibilityViolation& v) {
  std::ostringstream os;
  switch (v.kind) {
    case FeasibilityViolation::Kind::CapacityExceeded:
      os << "capacity_exceeded node=" << inst.node(v.node).id << " workload="
         << format_number(v.lhs) << " capacity=" << format_number(v.rhs);
      break;
    case FeasibilityViolation::Kind::TracksExceeded:
      os << "tracks_exceeded node=" << inst.node(v.node).id << " needed="
         << format_number(v.lhs) << " available=" << format_number(v.rhs);
      break;
    case FeasibilityViolation::Kind::RoutingCycle:
      os << "routing_cycle near=" << inst.node(v.node).id;
      break;
  }
  return os.str();
}

std::string assignment_to_string(const Instance& inst, const TcsAssignment& assignment) {
  std::vector<NodePair> pairs;
  for (const auto& [pair, rc] : assignment.route) pairs.push_back(pair);
  pairs = rank_sorted_pairs(inst, std::move(pairs));
  std::ostringstream os;
  bool first = true;
  for (const auto& pair : pairs) {
    const RouteChoice& rc = assignment.route.at(pair);
    if (!first) os << ";";
    first = false;
    os << inst.node(pair.first).id << "->" << inst.node(pair.second).id << "=";
    if (rc.is_direct())
      os << "direct";
    else
      os << "via:" << inst.node(rc.via).id;
  }
  return os.str();
}

}  // namespace yardloc
