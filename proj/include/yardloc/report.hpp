#pragma once

#include <iosfwd>
#include <string>

#include "yardloc/investment_solver.hpp"

namespace yardloc {

// Everything the audit trail needs besides the solve result itself. Wall
// time is deliberately absent: report files must be byte-identical across
// reruns, so timing goes to the console summary only.
struct ReportMeta {
  std::string mode;      // enumerate | anneal
  std::string tcs;       // exact | heuristic
  std::string track_fn;  // linear | step
  std::uint64_t seed = 0;
};

// Line-oriented, versioned (header `yardloc-report-v1`), key=value tokens.
std::string render_report(const Instance& inst, const UpperSolveResult& result,
                          const ReportMeta& meta);

// Fixed-width console summary; includes wall time.
std::string render_summary(const Instance& inst, const UpperSolveResult& result,
                           const ReportMeta& meta, double wall_ms);

// Minimal reader for audit tooling: recovers the decision and the reported
// cost figures from a v1 report.
struct ParsedReport {
  InvestmentDecision decision;
  double objective = 0.0;
  double z_total = 0.0;
  double annualized_capital = 0.0;
  double annual_operation = 0.0;
};

ParsedReport parse_report(const std::string& text);

}  // namespace yardloc
