#include "yardloc/tcs_solver.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "yardloc/util.hpp"

namespace yardloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Choice digits per closure pair: 0 = direct, d >= 1 = d-th relay option.
std::vector<int> encode_digits(const PairClosure& closure, const TcsAssignment& asg) {
  std::vector<int> digits;
  digits.reserve(closure.pairs.size());
  for (const auto& pair : closure.pairs) {
    const RouteChoice* rc = asg.find(pair.first, pair.second);
    int d = 0;
    if (rc && !rc->is_direct()) {
      const auto& vias = closure.vias.at(pair);
      auto it = std::find(vias.begin(), vias.end(), rc->via);
      d = static_cast<int>(it - vias.begin()) + 1;
    }
    digits.push_back(d);
  }
  return digits;
}

TcsAssignment decode_assignment(const PairClosure& closure, unsigned long long index) {
  TcsAssignment asg;
  for (size_t p = closure.pairs.size(); p-- > 0;) {
    const NodePair& pair = closure.pairs[p];
    const auto& vias = closure.vias.at(pair);
    unsigned long long radix = vias.size() + 1;
    int d = static_cast<int>(index % radix);
    index /= radix;
    if (d == 0)
      asg.set_direct(pair.first, pair.second);
    else
      asg.set_via(pair.first, pair.second, vias[static_cast<size_t>(d - 1)]);
  }
  return asg;
}

struct Evaluation {
  bool feasible = false;
  double cost = kInf;
  FlowState flows;
  CostBreakdown breakdown;
  FeasibilityReport report;
};

Evaluation evaluate_assignment(const Scenario& scenario, const TcsAssignment& asg) {
  Evaluation ev;
  try {
    ev.flows = compute_flows(scenario, asg);
  } catch (const FlowError& e) {
    ev.report.violations.push_back(
        {FeasibilityViolation::Kind::RoutingCycle, e.pair.first, e.pair, 0.0, 0.0});
    return ev;
  }
  ev.report = check_feasibility(scenario, asg, ev.flows);
  if (!ev.report.ok()) return ev;
  ev.breakdown = operating_cost(scenario, ev.flows);
  ev.cost = ev.breakdown.z_total;
  ev.feasible = true;
  return ev;
}

// Drop entries for pairs that carry no flow; they affect nothing.
TcsAssignment prune_vacuous(const TcsAssignment& asg, const FlowState& flows) {
  TcsAssignment out;
  for (const auto& [pair, rc] : asg.route)
    if (flows.flow(pair.first, pair.second) > 0) out.route.emplace(pair, rc);
  return out;
}

TcsPlan finish_plan(const Scenario& scenario, const TcsAssignment& asg, Optimality opt) {
  Evaluation ev = evaluate_assignment(scenario, asg);
  TcsPlan plan;
  plan.assignment = prune_vacuous(asg, ev.flows);
  plan.flows = std::move(ev.flows);
  plan.cost = ev.breakdown;
  plan.feasible = ev.feasible;
  plan.optimality = ev.feasible ? opt : Optimality::Infeasible;
  plan.diagnostics = std::move(ev.report);
  return plan;
}

TcsPlan infeasible_plan(FeasibilityReport diagnostics) {
  TcsPlan plan;
  plan.feasible = false;
  plan.optimality = Optimality::Infeasible;
  plan.diagnostics = std::move(diagnostics);
  return plan;
}

unsigned long long combination_total(const PairClosure& closure) {
  constexpr unsigned long long kMax = std::numeric_limits<long long>::max();
  unsigned long long total = 1;
  for (const auto& pair : closure.pairs) {
    unsigned long long radix = closure.vias.at(pair).size() + 1;
    if (total > kMax / radix)
      throw SolveLimitError("route choice space exceeds enumerable range");
    total *= radix;
  }
  return total;
}

struct SearchState {
  TcsAssignment asg;
  FlowState flows;
  CostBreakdown cost;
};

std::optional<SearchState> try_state(const Scenario& scenario, const TcsAssignment& asg,
                                     FeasibilityReport* diag = nullptr) {
  Evaluation ev = evaluate_assignment(scenario, asg);
  if (!ev.feasible) {
    if (diag) *diag = ev.report;
    return std::nullopt;
  }
  return SearchState{asg, std::move(ev.flows), ev.breakdown};
}

TcsAssignment all_direct(const PairClosure& closure) {
  TcsAssignment asg;
  for (const auto& pair : closure.pairs) asg.set_direct(pair.first, pair.second);
  return asg;
}

// Greedy start repair: while some origin needs more tracks than it has,
// push its largest direct service onto the least-loaded relay yard.
std::optional<SearchState> repair_all_direct(const Scenario& scenario,
                                             const PairClosure& closure,
                                             FeasibilityReport* diag) {
  TcsAssignment asg = all_direct(closure);
  std::set<NodePair> rerouted;

  for (size_t round = 0; round <= closure.pairs.size(); ++round) {
    Evaluation ev = evaluate_assignment(scenario, asg);
    if (ev.feasible) return SearchState{asg, std::move(ev.flows), ev.breakdown};
    if (diag) *diag = ev.report;

    const FeasibilityViolation* worst = nullptr;
    for (const auto& v : ev.report.violations) {
      if (v.kind != FeasibilityViolation::Kind::TracksExceeded) continue;
      if (!worst || v.lhs - v.rhs > worst->lhs - worst->rhs) worst = &v;
    }
    if (!worst) return std::nullopt;  // capacity/cycle trouble; greedy cannot help

    int origin = worst->node;
    const NodePair* pick = nullptr;
    double pick_flow = -1.0;
    for (const auto& pair : closure.pairs) {
      if (pair.first != origin || rerouted.count(pair)) continue;
      const RouteChoice* rc = asg.find(pair.first, pair.second);
      if (!rc || !rc->is_direct()) continue;
      if (closure.vias.at(pair).empty()) continue;
      double fl = ev.flows.flow(pair.first, pair.second);
      if (fl > pick_flow) {
        pick_flow = fl;
        pick = &pair;
      }
    }
    if (!pick || !(pick_flow > 0)) return std::nullopt;

    const auto& vias = closure.vias.at(*pick);
    int best_k = vias.front();
    for (int k : vias)
      if (ev.flows.workload[static_cast<size_t>(k)] <
          ev.flows.workload[static_cast<size_t>(best_k)])
        best_k = k;

    asg.set_via(pick->first, pick->second, best_k);
    rerouted.insert(*pick);
  }
  return std::nullopt;
}

std::optional<SearchState> random_start(const Scenario& scenario, const PairClosure& closure,
                                        std::mt19937_64& rng) {
  constexpr int kAttempts = 50;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    TcsAssignment asg;
    for (const auto& pair : closure.pairs) {
      const auto& vias = closure.vias.at(pair);
      auto d = rand_below(rng, vias.size() + 1);
      if (d == 0)
        asg.set_direct(pair.first, pair.second);
      else
        asg.set_via(pair.first, pair.second, vias[static_cast<size_t>(d - 1)]);
    }
    if (auto st = try_state(scenario, asg)) return st;
  }
  return std::nullopt;
}

// First improvement over single-pair route changes; rescans from the top
// after every accepted move. Pairs without flow are skipped, a change there
// is a no-op.
void local_search(const Scenario& scenario, const PairClosure& closure, SearchState& state,
                  int max_iterations) {
  int accepted = 0;
  bool improved = true;
  while (improved && accepted < max_iterations) {
    improved = false;
    for (const auto& pair : closure.pairs) {
      if (!(state.flows.flow(pair.first, pair.second) > 0)) continue;
      const RouteChoice current = *state.asg.find(pair.first, pair.second);
      const auto& vias = closure.vias.at(pair);
      for (int d = 0; d <= static_cast<int>(vias.size()); ++d) {
        RouteChoice candidate = d == 0 ? RouteChoice::direct()
                                       : RouteChoice::via_yard(vias[static_cast<size_t>(d - 1)]);
        if (candidate == current) continue;
        TcsAssignment next = state.asg;
        next.route[pair] = candidate;
        auto st = try_state(scenario, next);
        if (st && st->cost.z_total < state.cost.z_total) {
          state = std::move(*st);
          ++accepted;
          improved = true;
          break;
        }
      }
      if (improved) break;
    }
  }
}

bool state_better(const PairClosure& closure, const SearchState& a, const SearchState& b) {
  if (a.cost.z_total != b.cost.z_total) return a.cost.z_total < b.cost.z_total;
  return encode_digits(closure, a.asg) < encode_digits(closure, b.asg);
}

}  // namespace

std::string TcsPlan::to_string(const Instance& inst) const {
  std::ostringstream os;
  os << "feasible=" << (feasible ? "true" : "false");
  os << " optimality=";
  switch (optimality) {
    case Optimality::ProvenOptimal: os << "proven_optimal"; break;
    case Optimality::HeuristicBest: os << "heuristic_best"; break;
    case Optimality::Infeasible: os << "infeasible"; break;
  }
  os << " z_total=" << format_number(cost.z_total)
     << " accumulation=" << format_number(cost.accumulation)
     << " reclassification=" << format_number(cost.reclassification);
  os << " routes=" << assignment_to_string(inst, assignment);
  return os.str();
}

namespace detail {

TcsPlan enumerate_exact_serial(const Scenario& scenario, const PairClosure& closure) {
  const unsigned long long total = combination_total(closure);
  double best_cost = kInf;
  unsigned long long best_index = 0;
  bool found = false;
  FeasibilityReport first_report;

  for (unsigned long long idx = 0; idx < total; ++idx) {
    TcsAssignment asg = decode_assignment(closure, idx);
    Evaluation ev = evaluate_assignment(scenario, asg);
    if (idx == 0) first_report = ev.report;
    if (ev.feasible && ev.cost < best_cost) {
      best_cost = ev.cost;
      best_index = idx;
      found = true;
    }
  }

  if (!found) return infeasible_plan(std::move(first_report));
  return finish_plan(scenario, decode_assignment(closure, best_index),
                     Optimality::ProvenOptimal);
}

TcsPlan enumerate_exact_parallel(const Scenario& scenario, const PairClosure& closure,
                                 int threads) {
  const unsigned long long total = combination_total(closure);
  const long long n = static_cast<long long>(total);
  double best_cost = kInf;
  long long best_index = -1;
  FeasibilityReport first_report;

#ifdef _OPENMP
#pragma omp parallel num_threads(threads)
#endif
  {
    double local_cost = kInf;
    long long local_index = -1;
#ifdef _OPENMP
#pragma omp for schedule(static) nowait
#endif
    for (long long idx = 0; idx < n; ++idx) {
      TcsAssignment asg = decode_assignment(closure, static_cast<unsigned long long>(idx));
      Evaluation ev = evaluate_assignment(scenario, asg);
      if (idx == 0) {
#ifdef _OPENMP
#pragma omp critical(yardloc_tcs_first)
#endif
        first_report = ev.report;
      }
      if (ev.feasible &&
          (ev.cost < local_cost || (ev.cost == local_cost && idx < local_index))) {
        local_cost = ev.cost;
        local_index = idx;
      }
    }
#ifdef _OPENMP
#pragma omp critical(yardloc_tcs_best)
#endif
    {
      // Merge by (cost, index): schedule cannot change the winner.
      if (local_index >= 0 &&
          (best_index < 0 || local_cost < best_cost ||
           (local_cost == best_cost && local_index < best_index))) {
        best_cost = local_cost;
        best_index = local_index;
      }
    }
  }

  if (best_index < 0) return infeasible_plan(std::move(first_report));
  return finish_plan(scenario,
                     decode_assignment(closure, static_cast<unsigned long long>(best_index)),
                     Optimality::ProvenOptimal);
}

}  // namespace detail

TcsPlan solve_exact(const Scenario& scenario, const TcsSolveConfig& config) {
  PairClosure closure = build_closure(*scenario.instance);
  if (closure.pair_count() > config.exact_pair_limit)
    throw SolveLimitError("instance has " + std::to_string(closure.pair_count()) +
                          " routable pairs, exact enumeration accepts at most " +
                          std::to_string(config.exact_pair_limit));
  int threads = resolve_threads(config.threads);
  if (threads <= 1) return detail::enumerate_exact_serial(scenario, closure);
  return detail::enumerate_exact_parallel(scenario, closure, threads);
}

TcsPlan solve_heuristic(const Scenario& scenario, const TcsSolveConfig& config) {
  PairClosure closure = build_closure(*scenario.instance);
  const int restarts = std::max(1, config.restarts);
  std::vector<std::optional<SearchState>> results(static_cast<size_t>(restarts));
  FeasibilityReport repair_diag;

  const int threads = resolve_threads(config.threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (int r = 0; r < restarts; ++r) {
    std::optional<SearchState> start;
    if (r == 0) {
      FeasibilityReport diag;
      start = repair_all_direct(scenario, closure, &diag);
      if (!start) {
#ifdef _OPENMP
#pragma omp critical(yardloc_heur_diag)
#endif
        repair_diag = diag;
      }
    } else {
      std::mt19937_64 rng(mix_seed(config.rng_seed, static_cast<std::uint64_t>(r)));
      start = random_start(scenario, closure, rng);
    }
    if (start) {
      local_search(scenario, closure, *start, config.max_iterations);
      results[static_cast<size_t>(r)] = std::move(start);
    }
  }

  // Sequential merge in restart order keeps the result independent of the
  // parallel schedule.
  std::optional<SearchState> best;
  for (auto& res : results) {
    if (!res) continue;
    if (!best || state_better(closure, *res, *best)) best = std::move(res);
  }
  if (!best) return infeasible_plan(std::move(repair_diag));

  TcsPlan plan;
  plan.assignment = prune_vacuous(best->asg, best->flows);
  plan.flows = std::move(best->flows);
  plan.cost = best->cost;
  plan.feasible = true;
  plan.optimality = Optimality::HeuristicBest;
  return plan;
}

TcsPlan solve_tcs(const Scenario& scenario, const TcsSolveConfig& config) {
  return config.mode == TcsSolveConfig::Mode::Exact ? solve_exact(scenario, config)
                                                    : solve_heuristic(scenario, config);
}

double evaluate_z(const Scenario& scenario, const TcsSolveConfig& config) {
  TcsPlan plan = solve_tcs(scenario, config);
  if (!plan.feasible)
    throw InfeasibleError("no feasible train connecting service plan");
  return plan.cost.z_total;
}

}  // namespace yardloc
