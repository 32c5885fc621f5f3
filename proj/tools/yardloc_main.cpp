#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "yardloc/generator.hpp"
#include "yardloc/instance_io.hpp"
#include "yardloc/itinerary.hpp"
#include "yardloc/report.hpp"
#include "yardloc/validate.hpp"

namespace {

using namespace yardloc;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;  // infeasibility or validation violations
constexpr int kExitUsage = 2;   // I/O, parse, or usage errors

void print_violations(const ValidationReport& report) {
  for (const auto& v : report.violations)
    std::cout << "[" << v.rule << "] " << v.location << ": " << v.detail << "\n";
  for (const auto& w : report.warnings)
    std::cout << "warning [" << w.rule << "] " << w.location << ": " << w.detail << "\n";
}

int run_validate(const std::string& path) {
  Instance inst;
  try {
    inst = read_instance_file(path);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  ValidationReport report = validate_instance(inst);
  print_violations(report);
  return report.ok() ? kExitOk : kExitDomain;
}

int run_count(const std::string& path) {
  try {
    Instance inst = read_instance_file(path);
    ValidationReport report = validate_instance(inst);
    if (!report.ok()) {
      print_violations(report);
      return kExitDomain;
    }
    std::cout << "excluding_plan0=" << u128_to_string(count_investment_combinations(inst, false))
              << "\n";
    std::cout << "including_plan0=" << u128_to_string(count_investment_combinations(inst, true))
              << "\n";
    return kExitOk;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CountOverflowError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}

struct SolveArgs {
  std::string path;
  std::string mode = "enumerate";
  std::string tcs = "exact";
  std::string track_fn;  // empty = keep instance setting
  double budget_override = -1.0;
  bool has_budget_override = false;
  std::uint64_t seed = 0;
  std::string out;
  std::string log;
};

int run_solve(const SolveArgs& args) {
  Instance inst;
  try {
    inst = read_instance_file(args.path);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (args.has_budget_override) inst.economics.budget = args.budget_override;
  if (args.track_fn == "linear") {
    inst.economics.track_fn = {TrackFn::Kind::Linear, {}};
  } else if (args.track_fn == "step") {
    inst.economics.track_fn = {TrackFn::Kind::Step, {}};
  }

  ValidationReport vreport = validate_instance(inst);
  if (!vreport.ok()) {
    print_violations(vreport);
    return kExitDomain;
  }
  try {
    if (!inst.edges.empty()) derive_itineraries(inst);
  } catch (const ItineraryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }

  UpperSolveConfig config;
  config.mode = args.mode == "anneal" ? UpperSolveConfig::Mode::Anneal
                                      : UpperSolveConfig::Mode::Enumerate;
  config.lower.mode = args.tcs == "heuristic" ? TcsSolveConfig::Mode::Heuristic
                                              : TcsSolveConfig::Mode::Exact;
  config.lower.rng_seed = args.seed;
  config.anneal.rng_seed = args.seed;
  config.collect_log = !args.log.empty();

  ReportMeta meta;
  meta.mode = args.mode;
  meta.tcs = args.tcs;
  meta.track_fn = inst.economics.track_fn.kind == TrackFn::Kind::Linear ? "linear" : "step";
  meta.seed = args.seed;

  UpperSolveResult result;
  auto t0 = std::chrono::steady_clock::now();
  try {
    result = solve_investment(inst, config);
  } catch (const SolveLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const NoFeasibleDecisionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    // Show what blocks the no-investment baseline.
    try {
      InvestmentDecision baseline;
      for (const auto& n : inst.nodes)
        if (n.is_potential) baseline.choice[n.id] = 0;
      LocationPlan lp = evaluate_decision(inst, baseline, config);
      for (const auto& v : lp.tcs.diagnostics.violations)
        std::cerr << "  baseline: " << violation_to_string(inst, v) << "\n";
    } catch (const std::exception&) {
    }
    return kExitDomain;
  }
  double wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();

  if (!args.out.empty()) {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << args.out << "'\n";
      return kExitUsage;
    }
    out << render_report(inst, result, meta);
  }
  if (!args.log.empty()) {
    std::ofstream log(args.log, std::ios::binary);
    if (!log) {
      std::cerr << "error: cannot write '" << args.log << "'\n";
      return kExitUsage;
    }
    log << serialize_log(result.log);
  }
  std::cout << render_summary(inst, result, meta, wall_ms);
  return kExitOk;
}

int run_generate(const GeneratorSpec& spec, const std::string& out) {
  try {
    Instance inst = generate_instance(spec);
    write_instance_file(inst, out);
    return kExitOk;
  } catch (const GeneratorError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"classification yard investment and train connecting service planner"};
  app.require_subcommand(1);

  std::string validate_path;
  CLI::App* cmd_validate = app.add_subcommand("validate", "check an instance file");
  cmd_validate->add_option("file", validate_path, "instance file")->required();

  std::string count_path;
  CLI::App* cmd_count = app.add_subcommand("count", "print investment combination counts");
  cmd_count->add_option("file", count_path, "instance file")->required();

  SolveArgs solve_args;
  CLI::App* cmd_solve = app.add_subcommand("solve", "optimize investment and service plan");
  cmd_solve->add_option("file", solve_args.path, "instance file")->required();
  cmd_solve->add_option("--mode", solve_args.mode, "upper-level search")
      ->check(CLI::IsMember({"enumerate", "anneal"}));
  cmd_solve->add_option("--tcs", solve_args.tcs, "service-plan solver")
      ->check(CLI::IsMember({"exact", "heuristic"}));
  auto* b = cmd_solve->add_option("--budget-override", solve_args.budget_override,
                                  "replace the instance budget");
  cmd_solve->add_option("--track-fn", solve_args.track_fn, "track demand function")
      ->check(CLI::IsMember({"linear", "step"}));
  cmd_solve->add_option("--seed", solve_args.seed, "random seed");
  cmd_solve->add_option("--out", solve_args.out, "structured report file");
  cmd_solve->add_option("--log", solve_args.log, "per-decision audit log file");

  GeneratorSpec gen_spec;
  std::string gen_out;
  CLI::App* cmd_generate = app.add_subcommand("generate", "emit a synthetic instance");
  cmd_generate->add_option("--nodes", gen_spec.node_count, "yard count");
  cmd_generate->add_option("--potential-fraction", gen_spec.potential_fraction,
                           "fraction of improvable yards");
  cmd_generate->add_option("--plans", gen_spec.plans_per_node, "plans per improvable yard");
  cmd_generate->add_option("--demand-density", gen_spec.demand_density,
                           "probability a pair carries demand");
  cmd_generate->add_option("--capacity-slack", gen_spec.capacity_slack,
                           "headroom factor over the all-direct baseline");
  cmd_generate->add_option("--seed", gen_spec.rng_seed, "random seed");
  cmd_generate->add_option("--out", gen_out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  solve_args.has_budget_override = b->count() > 0;

  if (*cmd_validate) return run_validate(validate_path);
  if (*cmd_count) return run_count(count_path);
  if (*cmd_solve) return run_solve(solve_args);
  if (*cmd_generate) return run_generate(gen_spec, gen_out);
  return kExitUsage;
}
