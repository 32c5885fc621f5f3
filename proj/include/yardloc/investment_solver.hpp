#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "yardloc/tcs_solver.hpp"

namespace yardloc {

struct AnnealParams {
  double initial_temp = 0.0;   // <= 0: scaled from the baseline objective
  double cooling_rate = 0.995; // geometric, in (0,1)
  int steps = 2000;
  std::uint64_t rng_seed = 0;
};

struct UpperSolveConfig {
  enum class Mode { Enumerate, Anneal };
  Mode mode = Mode::Enumerate;
  std::uint64_t enumerate_limit = 1000000;
  AnnealParams anneal;
  TcsSolveConfig lower;
  int threads = 0;         // 0 = resolve from environment / OpenMP
  bool collect_log = false;
};

// Converts a lump investment into the equivalent uniform annual cost over
// `lifetime_years` at `discount_rate`; the zero-rate limit is straight-line
// 1/T. Stable for very long lifetimes (approaches the rate itself).
double capital_recovery_factor(double discount_rate, int lifetime_years);

// Sum of annualized plan costs over the nodes where a plan is chosen.
double annualized_investment(const Instance& inst, const InvestmentDecision& decision);

// Raw (undiscounted) plan costs against the budget, boundary inclusive.
bool budget_feasible(const Instance& inst, const InvestmentDecision& decision);

struct LocationPlan {
  InvestmentDecision decision;
  TcsPlan tcs;
  double annualized_capital = 0.0;
  double annual_operation = 0.0;  // day_count * car_hour_value * z
  double objective = 0.0;         // undefined when !feasible()
  bool within_budget = false;

  bool feasible() const { return tcs.feasible; }
};

// Builds the scenario, solves the service-plan level, and combines the
// annualized capital with the annual operating cost. A budget overrun is
// recorded, not rejected.
LocationPlan evaluate_decision(const Instance& inst, const InvestmentDecision& decision,
                               const UpperSolveConfig& config);

struct SolveLogRecord {
  std::string decision;  // canonical decision vector
  bool within_budget = false;
  enum class Status { Evaluated, SkippedBudget, LowerInfeasible };
  Status status = Status::Evaluated;
  double z = 0.0;
  double objective = 0.0;

  std::string to_line() const;
};

struct UpperSolveResult {
  LocationPlan best;
  std::vector<SolveLogRecord> log;   // one record per decision, audit order
  std::uint64_t decisions_evaluated = 0;  // lower-level solves performed
  std::uint64_t decisions_total = 0;
};

struct NoFeasibleDecisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Minimizes annualized capital + annual operating cost over investment
// decisions. Enumerate mode sweeps the whole decision space (deterministic
// lexicographic tie-break, schedule-independent under OpenMP); Anneal mode
// runs seeded simulated annealing and never returns worse than the
// no-investment baseline when that baseline is feasible.
UpperSolveResult solve_investment(const Instance& inst, const UpperSolveConfig& config);

std::string serialize_log(const std::vector<SolveLogRecord>& log);

namespace detail {
UpperSolveResult enumerate_serial(const Instance& inst, const UpperSolveConfig& config);
UpperSolveResult enumerate_parallel(const Instance& inst, const UpperSolveConfig& config,
                                    int threads);
}  // namespace detail

}  // namespace yardloc
