#pragma once

#include <cstdint>
#include <string>

#include "yardloc/flow.hpp"

namespace yardloc {

struct TcsSolveConfig {
  enum class Mode { Exact, Heuristic };
  Mode mode = Mode::Exact;
  int exact_pair_limit = 12;   // max closure pairs the enumerator accepts
  int restarts = 8;
  int max_iterations = 10000;  // accepted moves per restart
  std::uint64_t rng_seed = 0;
  int threads = 0;             // 0 = resolve from environment / OpenMP
};

struct SolveLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Optimality { ProvenOptimal, HeuristicBest, Infeasible };

struct TcsPlan {
  TcsAssignment assignment;
  FlowState flows;
  CostBreakdown cost;
  bool feasible = false;
  Optimality optimality = Optimality::Infeasible;
  FeasibilityReport diagnostics;  // populated when infeasible

  // Canonical rendering for determinism checks and logs.
  std::string to_string(const Instance& inst) const;
};

// Enumerates every combination of per-pair choices over the routing
// closure and returns the cheapest feasible one; ties go to the
// lexicographically smallest choice vector. Throws SolveLimitError when the
// closure exceeds exact_pair_limit.
TcsPlan solve_exact(const Scenario& scenario, const TcsSolveConfig& config);

// Multi-start first-improvement local search over single-pair route
// changes. Restart 0 starts from all-direct repaired to feasibility;
// later restarts from seeded random feasible assignments. Deterministic for
// a fixed seed, independent of worker count.
TcsPlan solve_heuristic(const Scenario& scenario, const TcsSolveConfig& config);

// Dispatch on config.mode.
TcsPlan solve_tcs(const Scenario& scenario, const TcsSolveConfig& config);

// Least daily operating cost achievable under the scenario; throws
// SolveLimitError when no feasible service plan exists.
double evaluate_z(const Scenario& scenario, const TcsSolveConfig& config);

namespace detail {
// Serial reference kernel and its OpenMP counterpart; both return the same
// plan. Kept separate so tests can assert equality and the benchmark can
// time them against each other.
TcsPlan enumerate_exact_serial(const Scenario& scenario, const PairClosure& closure);
TcsPlan enumerate_exact_parallel(const Scenario& scenario, const PairClosure& closure,
                                 int threads);
}  // namespace detail

}  // namespace yardloc
