#include "yardloc/report.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "yardloc/util.hpp"

namespace yardloc {

namespace {

constexpr const char* kReportTag = "yardloc-report-v1";

std::string optimality_name(Optimality o) {
  switch (o) {
    case Optimality::ProvenOptimal: return "proven_optimal";
    case Optimality::HeuristicBest: return "heuristic_best";
    case Optimality::Infeasible: return "infeasible";
  }
  return "infeasible";
}

double safe_track_demand(double service_flow, const TrackFn& fn) {
  try {
    return track_demand(service_flow, fn);
  } catch (const TrackOverflowError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

std::string render_report(const Instance& inst, const UpperSolveResult& result,
                          const ReportMeta& meta) {
  const LocationPlan& best = result.best;
  Scenario scenario = make_scenario(inst, best.decision);
  std::ostringstream os;
  os << kReportTag << "\n";
  os << "meta mode=" << meta.mode << " tcs=" << meta.tcs << " track_fn=" << meta.track_fn
     << " seed=" << meta.seed << " decisions_total=" << result.decisions_total
     << " decisions_evaluated=" << result.decisions_evaluated << "\n";

  int original = 0, potential = 0;
  for (const auto& n : inst.nodes) {
    original += n.is_original_yard ? 1 : 0;
    potential += n.is_potential ? 1 : 0;
  }
  os << "instance nodes=" << inst.node_count() << " original=" << original
     << " potential=" << potential << " demands=" << inst.demands.size()
     << " budget=" << format_number(inst.economics.budget) << "\n";

  for (const auto& [id, plan] : best.decision.choice) {
    os << "decision node=" << id << " plan=" << plan;
    if (plan >= 1) {
      const Node& n = inst.node(inst.index_of(id));
      const InvestmentPlan& p = n.plans[static_cast<size_t>(plan - 1)];
      os << " cost=" << format_number(p.cost) << " lifetime=" << p.lifetime_years
         << " annualized="
         << format_number(capital_recovery_factor(inst.economics.discount_rate,
                                                  p.lifetime_years) *
                          p.cost);
    }
    os << "\n";
  }

  std::vector<NodePair> pairs;
  for (const auto& [pair, rc] : best.tcs.assignment.route) pairs.push_back(pair);
  std::sort(pairs.begin(), pairs.end(), [&](const NodePair& a, const NodePair& b) {
    return std::make_pair(inst.node(a.first).id, inst.node(a.second).id) <
           std::make_pair(inst.node(b.first).id, inst.node(b.second).id);
  });
  for (const auto& pair : pairs) {
    const RouteChoice& rc = best.tcs.assignment.route.at(pair);
    double service = best.tcs.flows.service(pair.first, pair.second);
    os << "tcs pair=" << inst.node(pair.first).id << "->" << inst.node(pair.second).id
       << " route=" << (rc.is_direct() ? "direct" : "via:" + inst.node(rc.via).id)
       << " f=" << format_number(best.tcs.flows.flow(pair.first, pair.second))
       << " D=" << format_number(service)
       << " tracks=" << format_number(safe_track_demand(service, inst.economics.track_fn))
       << "\n";
  }

  for (int r = 0; r < inst.node_count(); ++r) {
    int k = inst.by_rank[static_cast<size_t>(r)];
    double tracks_used = 0.0;
    for (const auto& [pair, service] : best.tcs.flows.service_flow)
      if (pair.first == k)
        tracks_used += safe_track_demand(service, inst.economics.track_fn);
    double workload = best.tcs.flows.workload[static_cast<size_t>(k)];
    double capacity = scenario.effective_capacity[static_cast<size_t>(k)];
    os << "yard node=" << inst.node(k).id << " workload=" << format_number(workload)
       << " capacity=" << format_number(capacity)
       << " utilization=" << format_number(capacity > 0 ? workload / capacity : 0.0)
       << " tracks_used=" << format_number(tracks_used)
       << " tracks_available=" << format_number(scenario.effective_tracks[static_cast<size_t>(k)])
       << "\n";
  }

  os << "cost accumulation=" << format_number(best.tcs.cost.accumulation)
     << " reclassification=" << format_number(best.tcs.cost.reclassification)
     << " z_total=" << format_number(best.tcs.cost.z_total) << "\n";
  os << "cost annualized_capital=" << format_number(best.annualized_capital)
     << " annual_operation=" << format_number(best.annual_operation)
     << " objective=" << format_number(best.objective) << "\n";
  os << "status feasible=" << (best.feasible() ? "true" : "false")
     << " within_budget=" << (best.within_budget ? "true" : "false")
     << " optimality=" << optimality_name(best.tcs.optimality) << "\n";
  return os.str();
}

std::string render_summary(const Instance& inst, const UpperSolveResult& result,
                           const ReportMeta& meta, double wall_ms) {
  const LocationPlan& best = result.best;
  std::ostringstream os;
  auto row = [&](const std::string& key, const std::string& value) {
    os << "  " << std::left << std::setw(22) << key << value << "\n";
  };
  os << "yardloc solve\n";
  row("nodes", std::to_string(inst.node_count()));
  row("demands", std::to_string(inst.demands.size()));
  row("mode", meta.mode);
  row("tcs", meta.tcs);
  row("track_fn", meta.track_fn);
  row("seed", std::to_string(meta.seed));
  row("decisions total", std::to_string(result.decisions_total));
  row("decisions evaluated", std::to_string(result.decisions_evaluated));
  std::string decision_str = best.decision.to_string();
  row("decision", decision_str);
  row("annualized capital", format_number(best.annualized_capital));
  row("annual operation", format_number(best.annual_operation));
  row("objective", format_number(best.objective));
  row("z (car-hours/day)", format_number(best.tcs.cost.z_total));
  row("optimality", optimality_name(best.tcs.optimality));
  row("within budget", best.within_budget ? "yes" : "no");
  row("wall_ms", format_number(wall_ms));
  return os.str();
}

ParsedReport parse_report(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kReportTag)
    throw std::runtime_error("not a " + std::string(kReportTag) + " document");
  ParsedReport pr;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    std::map<std::string, std::string> kv;
    std::string token;
    while (ls >> token) {
      auto eq = token.find('=');
      if (eq != std::string::npos) kv[token.substr(0, eq)] = token.substr(eq + 1);
    }
    if (word == "decision") {
      pr.decision.choice[kv.at("node")] = std::stoi(kv.at("plan"));
    } else if (word == "cost") {
      if (kv.count("objective")) pr.objective = parse_number(kv.at("objective"));
      if (kv.count("z_total")) pr.z_total = parse_number(kv.at("z_total"));
      if (kv.count("annualized_capital"))
        pr.annualized_capital = parse_number(kv.at("annualized_capital"));
      if (kv.count("annual_operation"))
        pr.annual_operation = parse_number(kv.at("annual_operation"));
    }
  }
  return pr;
}

}  // namespace yardloc
