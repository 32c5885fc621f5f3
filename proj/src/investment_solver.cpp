#include "yardloc/investment_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "yardloc/util.hpp"

namespace yardloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Potential nodes in id order; decisions enumerate as mixed-radix counters
// over these, most significant digit first, so index order equals
// lexicographic decision order.
std::vector<int> potential_nodes_by_id(const Instance& inst) {
  std::vector<int> out;
  for (int r = 0; r < inst.node_count(); ++r) {
    int i = inst.by_rank[static_cast<size_t>(r)];
    if (inst.node(i).is_potential) out.push_back(i);
  }
  return out;
}

InvestmentDecision decision_from_index(const Instance& inst, const std::vector<int>& pnodes,
                                       unsigned long long index) {
  InvestmentDecision d;
  for (size_t p = pnodes.size(); p-- > 0;) {
    const Node& n = inst.node(pnodes[p]);
    unsigned long long radix = n.plans.size() + 1;
    d.choice[n.id] = static_cast<int>(index % radix);
    index /= radix;
  }
  return d;
}

InvestmentDecision baseline_decision(const Instance& inst) {
  InvestmentDecision d;
  for (const auto& n : inst.nodes)
    if (n.is_potential) d.choice[n.id] = 0;
  return d;
}

SolveLogRecord make_record(const InvestmentDecision& d, bool within_budget,
                           SolveLogRecord::Status status, double z, double objective) {
  SolveLogRecord rec;
  rec.decision = d.to_string();
  rec.within_budget = within_budget;
  rec.status = status;
  rec.z = z;
  rec.objective = objective;
  return rec;
}

}  // namespace

double capital_recovery_factor(double discount_rate, int lifetime_years) {
  if (lifetime_years < 1) throw std::invalid_argument("lifetime must be >= 1 year");
  if (discount_rate < 0) throw std::invalid_argument("discount rate must be >= 0");
  if (discount_rate == 0.0) return 1.0 / static_cast<double>(lifetime_years);
  // Algebraic form that stays finite for very long lifetimes.
  return discount_rate /
         (1.0 - std::pow(1.0 + discount_rate, -static_cast<double>(lifetime_years)));
}

double annualized_investment(const Instance& inst, const InvestmentDecision& decision) {
  double total = 0.0;
  for (const auto& [id, p] : decision.choice) {
    if (p < 1) continue;
    const Node& n = inst.node(inst.index_of(id));
    const InvestmentPlan& plan = n.plans[static_cast<size_t>(p - 1)];
    total += capital_recovery_factor(inst.economics.discount_rate, plan.lifetime_years) *
             plan.cost;
  }
  return total;
}

bool budget_feasible(const Instance& inst, const InvestmentDecision& decision) {
  double total = 0.0;
  for (const auto& [id, p] : decision.choice) {
    if (p < 1) continue;
    const Node& n = inst.node(inst.index_of(id));
    total += n.plans[static_cast<size_t>(p - 1)].cost;
  }
  return total <= inst.economics.budget;
}

LocationPlan evaluate_decision(const Instance& inst, const InvestmentDecision& decision,
                               const UpperSolveConfig& config) {
  LocationPlan lp;
  lp.decision = decision;
  lp.within_budget = budget_feasible(inst, decision);
  lp.annualized_capital = annualized_investment(inst, decision);
  Scenario scenario = make_scenario(inst, decision);
  lp.tcs = solve_tcs(scenario, config.lower);
  if (lp.tcs.feasible) {
    lp.annual_operation = static_cast<double>(inst.economics.day_count) *
                          inst.economics.car_hour_value * lp.tcs.cost.z_total;
    lp.objective = lp.annualized_capital + lp.annual_operation;
  } else {
    lp.annual_operation = kInf;
    lp.objective = kInf;
  }
  return lp;
}

std::string SolveLogRecord::to_line() const {
  std::ostringstream os;
  os << "decision=" << decision << " budget=" << (within_budget ? "ok" : "exceeded")
     << " status=";
  switch (status) {
    case Status::Evaluated: os << "evaluated"; break;
    case Status::SkippedBudget: os << "skipped_budget"; break;
    case Status::LowerInfeasible: os << "lower_infeasible"; break;
  }
  if (status == Status::Evaluated)
    os << " z=" << format_number(z) << " objective=" << format_number(objective);
  else
    os << " z=- objective=-";
  return os.str();
}

std::string serialize_log(const std::vector<SolveLogRecord>& log) {
  std::string out = "yardloc-solvelog-v1\n";
  for (const auto& rec : log) out += rec.to_line() + "\n";
  return out;
}

namespace detail {

namespace {

struct EnumShared {
  const Instance* inst;
  const UpperSolveConfig* config;
  std::vector<int> pnodes;
  unsigned long long total = 0;
};

EnumShared enum_setup(const Instance& inst, const UpperSolveConfig& config) {
  EnumShared sh{&inst, &config, potential_nodes_by_id(inst), 0};
  u128 count = count_investment_combinations(inst, true);
  if (count > static_cast<u128>(config.enumerate_limit))
    throw SolveLimitError("decision space has " + u128_to_string(count) +
                          " combinations, over the enumerate limit of " +
                          std::to_string(config.enumerate_limit) +
                          "; use anneal mode");
  sh.total = static_cast<unsigned long long>(count);
  return sh;
}

// status/z/objective for one decision index; shared by both kernels.
SolveLogRecord eval_index(const EnumShared& sh, unsigned long long idx, bool* evaluated,
                          double* objective_out) {
  InvestmentDecision d = decision_from_index(*sh.inst, sh.pnodes, idx);
  *evaluated = false;
  *objective_out = kInf;
  if (!budget_feasible(*sh.inst, d))
    return make_record(d, false, SolveLogRecord::Status::SkippedBudget, 0, 0);
  *evaluated = true;
  LocationPlan lp = evaluate_decision(*sh.inst, d, *sh.config);
  if (!lp.feasible())
    return make_record(d, true, SolveLogRecord::Status::LowerInfeasible, 0, 0);
  *objective_out = lp.objective;
  return make_record(d, true, SolveLogRecord::Status::Evaluated, lp.tcs.cost.z_total,
                     lp.objective);
}

UpperSolveResult enum_finish(const EnumShared& sh, long long best_index,
                             std::vector<SolveLogRecord> log, std::uint64_t evaluated) {
  if (best_index < 0)
    throw NoFeasibleDecisionError(
        "no budget-feasible decision admits a feasible service plan");
  UpperSolveResult res;
  res.best = evaluate_decision(
      *sh.inst, decision_from_index(*sh.inst, sh.pnodes, static_cast<unsigned long long>(best_index)),
      *sh.config);
  res.log = std::move(log);
  res.decisions_evaluated = evaluated;
  res.decisions_total = sh.total;
  return res;
}

}  // namespace

UpperSolveResult enumerate_serial(const Instance& inst, const UpperSolveConfig& config) {
  EnumShared sh = enum_setup(inst, config);
  std::vector<SolveLogRecord> log;
  if (config.collect_log) log.resize(sh.total);

  double best_cost = kInf;
  long long best_index = -1;
  std::uint64_t evaluated = 0;
  for (unsigned long long idx = 0; idx < sh.total; ++idx) {
    bool did_eval = false;
    double obj = kInf;
    SolveLogRecord rec = eval_index(sh, idx, &did_eval, &obj);
    if (config.collect_log) log[idx] = std::move(rec);
    if (did_eval) ++evaluated;
    if (obj < best_cost) {
      best_cost = obj;
      best_index = static_cast<long long>(idx);
    }
  }
  return enum_finish(sh, best_index, std::move(log), evaluated);
}

UpperSolveResult enumerate_parallel(const Instance& inst, const UpperSolveConfig& config,
                                    int threads) {
  EnumShared sh = enum_setup(inst, config);
  std::vector<SolveLogRecord> log;
  if (config.collect_log) log.resize(sh.total);
  const long long n = static_cast<long long>(sh.total);

  double best_cost = kInf;
  long long best_index = -1;
  std::uint64_t evaluated = 0;

#ifdef _OPENMP
#pragma omp parallel num_threads(threads)
#endif
  {
    double local_cost = kInf;
    long long local_index = -1;
    std::uint64_t local_evaluated = 0;
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 1) nowait
#endif
    for (long long idx = 0; idx < n; ++idx) {
      bool did_eval = false;
      double obj = kInf;
      SolveLogRecord rec = eval_index(sh, static_cast<unsigned long long>(idx), &did_eval, &obj);
      if (config.collect_log) log[static_cast<size_t>(idx)] = std::move(rec);
      if (did_eval) ++local_evaluated;
      if (obj < local_cost || (obj == local_cost && obj < kInf && idx < local_index)) {
        local_cost = obj;
        local_index = idx;
      }
    }
#ifdef _OPENMP
#pragma omp critical(yardloc_enum_best)
#endif
    {
      evaluated += local_evaluated;
      if (local_index >= 0 &&
          (best_index < 0 || local_cost < best_cost ||
           (local_cost == best_cost && local_index < best_index))) {
        best_cost = local_cost;
        best_index = local_index;
      }
    }
  }
  return enum_finish(sh, best_index, std::move(log), evaluated);
}

}  // namespace detail

namespace {

UpperSolveResult solve_anneal(const Instance& inst, const UpperSolveConfig& config) {
  std::vector<int> pnodes = potential_nodes_by_id(inst);
  std::mt19937_64 rng(config.anneal.rng_seed);
  UpperSolveResult res;
  {
    u128 count = count_investment_combinations(inst, true);
    constexpr u128 kU64Max = std::numeric_limits<std::uint64_t>::max();
    res.decisions_total = static_cast<std::uint64_t>(count > kU64Max ? kU64Max : count);
  }

  std::map<std::string, LocationPlan> memo;
  auto evaluate = [&](const InvestmentDecision& d) -> const LocationPlan& {
    std::string key = d.to_string();
    auto it = memo.find(key);
    if (it == memo.end()) {
      ++res.decisions_evaluated;
      it = memo.emplace(key, evaluate_decision(inst, d, config)).first;
    }
    if (config.collect_log) {
      const LocationPlan& lp = it->second;
      res.log.push_back(make_record(
          d, lp.within_budget,
          lp.feasible() ? SolveLogRecord::Status::Evaluated
                        : SolveLogRecord::Status::LowerInfeasible,
          lp.feasible() ? lp.tcs.cost.z_total : 0, lp.feasible() ? lp.objective : 0));
    }
    return it->second;
  };

  // The no-investment baseline anchors the search: the result never comes
  // out worse than it while it is feasible.
  const LocationPlan& baseline = evaluate(baseline_decision(inst));
  std::optional<LocationPlan> current;
  if (baseline.feasible()) current = baseline;

  for (int attempt = 0; attempt < 200 && !current; ++attempt) {
    InvestmentDecision d;
    for (int i : pnodes) {
      const Node& n = inst.node(i);
      d.choice[n.id] = static_cast<int>(rand_below(rng, n.plans.size() + 1));
    }
    if (!budget_feasible(inst, d)) {
      if (config.collect_log)
        res.log.push_back(make_record(d, false, SolveLogRecord::Status::SkippedBudget, 0, 0));
      continue;
    }
    const LocationPlan& lp = evaluate(d);
    if (lp.feasible()) current = lp;
  }
  if (!current)
    throw NoFeasibleDecisionError(
        "no budget-feasible decision admits a feasible service plan");

  LocationPlan best = *current;
  double temp = config.anneal.initial_temp > 0
                    ? config.anneal.initial_temp
                    : std::max(1.0, 0.05 * std::abs(current->objective));

  bool movable = false;
  for (int i : pnodes) movable = movable || !inst.node(i).plans.empty();

  for (int step = 0; movable && step < config.anneal.steps; ++step, temp *= config.anneal.cooling_rate) {
    // Flip one node to a different plan index.
    int pick = pnodes[static_cast<size_t>(rand_below(rng, pnodes.size()))];
    const Node& n = inst.node(pick);
    if (n.plans.empty()) continue;
    int old = current->decision.choice.at(n.id);
    auto alt = static_cast<int>(rand_below(rng, n.plans.size()));
    int next = alt >= old ? alt + 1 : alt;
    InvestmentDecision d = current->decision;
    d.choice[n.id] = next;

    if (!budget_feasible(inst, d)) {
      if (config.collect_log)
        res.log.push_back(make_record(d, false, SolveLogRecord::Status::SkippedBudget, 0, 0));
      continue;
    }
    const LocationPlan& lp = evaluate(d);
    if (!lp.feasible()) continue;
    double delta = lp.objective - current->objective;
    if (delta < 0 || rand_unit(rng) < std::exp(-delta / temp)) current = lp;
    if (current->objective < best.objective) best = *current;
  }

  res.best = std::move(best);
  return res;
}

}  // namespace

UpperSolveResult solve_investment(const Instance& inst, const UpperSolveConfig& config) {
  if (config.mode == UpperSolveConfig::Mode::Anneal) return solve_anneal(inst, config);
  int threads = resolve_threads(config.threads);
  if (threads <= 1) return detail::enumerate_serial(inst, config);
  return detail::enumerate_parallel(inst, config, threads);
}

}  // namespace yardloc
