#include "yardloc/validate.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "yardloc/util.hpp"

namespace yardloc {

namespace {

std::string pair_loc(const NodeId& a, const NodeId& b) { return a + "->" + b; }

// Demand pairs without an explicit itinerary must be connected through the
// physical edge list so a route can be derived.
std::set<int> reachable_from(int start, const std::vector<std::vector<int>>& adj) {
  std::set<int> seen{start};
  std::queue<int> q;
  q.push(start);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[static_cast<size_t>(u)])
      if (seen.insert(v).second) q.push(v);
  }
  return seen;
}

}  // namespace

ValidationReport validate_instance(const Instance& inst) {
  ValidationReport rep;
  auto violate = [&](const std::string& rule, const std::string& loc, const std::string& detail) {
    rep.violations.push_back({rule, loc, detail});
  };
  auto warn = [&](const std::string& rule, const std::string& loc, const std::string& detail) {
    rep.warnings.push_back({rule, loc, detail});
  };

  std::set<NodeId> ids;
  for (const auto& n : inst.nodes) {
    if (n.id.empty()) violate("node.id.empty", "<node>", "node id must be non-empty");
    if (!ids.insert(n.id).second)
      violate("node.id.duplicate", n.id, "node id declared more than once");

    const YardAttributes& a = n.attrs;
    if (!n.is_original_yard && !n.is_potential)
      violate("node.role.none", n.id, "node is neither an original yard nor a potential site");
    if (!n.plans.empty() && !n.is_potential)
      violate("node.plans.on_non_potential", n.id, "investment plans on a non-potential node");
    if (n.is_potential && !n.is_original_yard &&
        (a.capacity_total != 0 || a.capacity_local != 0 || a.tracks_total != 0 ||
         a.tracks_local != 0))
      violate("node.newsite.nonzero", n.id,
              "a candidate site that is not yet a yard must have zero capacity and tracks");

    if (a.accumulation_param < 0)
      violate("attrs.c.negative", n.id, "accumulation parameter must be >= 0");
    if (a.reclass_cost < 0) violate("attrs.tau.negative", n.id, "reclass cost must be >= 0");
    if (a.capacity_total < 0 || a.capacity_local < 0 || a.capacity_local > a.capacity_total)
      violate("attrs.cap_local.range", n.id, "need 0 <= cap_local <= cap_total");
    if (a.tracks_total < 0 || a.tracks_local < 0 || a.tracks_local > a.tracks_total)
      violate("attrs.tracks_local.range", n.id, "need 0 <= tracks_local <= tracks_total");

    for (size_t p = 0; p < n.plans.size(); ++p) {
      const InvestmentPlan& pl = n.plans[p];
      const std::string loc = n.id + "/plan" + std::to_string(p + 1);
      if (pl.cost < 0) violate("plan.cost.negative", loc, "plan cost must be >= 0");
      if (pl.lifetime_years < 1) violate("plan.lifetime.min", loc, "lifetime must be >= 1 year");
      if (pl.reclass_cost_after < 0)
        violate("plan.tau_after.negative", loc, "reclass cost after must be >= 0");
      if (pl.capacity_gain < 0) violate("plan.cap_gain.negative", loc, "capacity gain must be >= 0");
      if (pl.tracks_gain < 0) violate("plan.tracks_gain.negative", loc, "tracks gain must be >= 0");
    }
  }

  std::vector<std::vector<int>> adj(inst.nodes.size());
  for (const auto& e : inst.edges) {
    int ia = inst.index_of(e.a), ib = inst.index_of(e.b);
    const std::string loc = e.a + "-" + e.b;
    if (ia < 0 || ib < 0) {
      violate("edge.unknown_node", loc, "edge endpoint not declared");
      continue;
    }
    if (e.length < 0) violate("edge.negative_length", loc, "edge length must be >= 0");
    if (ia == ib) violate("edge.self_loop", loc, "edge endpoints must differ");
    adj[static_cast<size_t>(ia)].push_back(ib);
    adj[static_cast<size_t>(ib)].push_back(ia);
  }

  for (const auto& [key, via] : inst.itineraries) {
    const std::string loc = pair_loc(key.first, key.second);
    if (inst.index_of(key.first) < 0 || inst.index_of(key.second) < 0) {
      violate("itin.unknown_node", loc, "itinerary endpoint not declared");
      continue;
    }
    if (key.first == key.second) violate("itin.self_loop", loc, "endpoints must differ");
    std::set<NodeId> seen_via;
    for (const auto& k : via) {
      if (inst.index_of(k) < 0) {
        violate("itin.unknown_node", loc, "via node '" + k + "' not declared");
        continue;
      }
      if (k == key.first || k == key.second)
        violate("itin.contains_endpoint", loc, "via contains endpoint '" + k + "'");
      if (!seen_via.insert(k).second)
        violate("itin.duplicate_via", loc, "via node '" + k + "' repeated");
    }
  }

  std::set<std::pair<NodeId, NodeId>> demand_pairs;
  for (const auto& d : inst.demands) {
    const std::string loc = pair_loc(d.origin, d.destination);
    int io = inst.index_of(d.origin), id = inst.index_of(d.destination);
    if (io < 0 || id < 0) {
      violate("demand.unknown_node", loc, "demand endpoint not declared");
      continue;
    }
    if (d.origin == d.destination) violate("demand.self_loop", loc, "origin equals destination");
    if (!(d.volume > 0)) violate("demand.volume.positive", loc, "volume must be > 0");
    if (!demand_pairs.insert({d.origin, d.destination}).second)
      violate("demand.duplicate_pair", loc, "pair declared more than once");

    if (d.origin != d.destination && !inst.itinerary(d.origin, d.destination)) {
      bool derivable = false;
      if (!inst.edges.empty()) {
        auto reach = reachable_from(io, adj);
        derivable = reach.count(id) > 0;
      }
      if (!derivable)
        violate("demand.unroutable", loc, "no itinerary and no physical path to derive one");
    }

    // A candidate site that is not yet a yard may still load and unload
    // cars; worth flagging since its zero tracks usually bind.
    const Node* on = io >= 0 ? &inst.node(io) : nullptr;
    if (on && on->is_potential && !on->is_original_yard)
      warn("demand.origin.new_site", loc, "demand originates at a not-yet-built site");
    const Node* dn = id >= 0 ? &inst.node(id) : nullptr;
    if (dn && dn->is_potential && !dn->is_original_yard)
      warn("demand.destination.new_site", loc, "demand terminates at a not-yet-built site");
  }

  const EconomicParams& ec = inst.economics;
  if (ec.budget < 0) violate("econ.budget.negative", "economics", "budget must be >= 0");
  if (!(ec.discount_rate > 0 && ec.discount_rate < 1))
    violate("econ.discount_rate.range", "economics", "discount rate must be in (0,1)");
  if (!(ec.car_hour_value > 0))
    violate("econ.car_hour_value.positive", "economics", "car-hour value must be > 0");
  if (ec.day_count < 1) violate("econ.day_count.min", "economics", "day count must be >= 1");
  if (!(ec.train_size_default > 0))
    violate("econ.train_size.positive", "economics", "default train size must be > 0");
  for (const auto& [key, size] : ec.train_size_overrides) {
    const std::string loc = pair_loc(key.first, key.second);
    if (inst.index_of(key.first) < 0 || inst.index_of(key.second) < 0)
      violate("econ.override.unknown_node", loc, "override endpoint not declared");
    if (!(size > 0)) violate("econ.train_size.positive", loc, "override train size must be > 0");
  }
  const auto& th = ec.track_fn.thresholds;
  for (size_t i = 0; i < th.size(); ++i) {
    if (th[i] <= 0 || (i > 0 && th[i] <= th[i - 1])) {
      violate("econ.thresholds.increasing", "economics",
              "track thresholds must be positive and strictly increasing");
      break;
    }
  }

  return rep;
}

}  // namespace yardloc
