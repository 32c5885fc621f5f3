#include <doctest.h>

#include "oracle.hpp"
#include "support.hpp"
#include "yardloc/generator.hpp"
#include "yardloc/tcs_solver.hpp"
#include "yardloc/util.hpp"

using namespace yardloc;
using namespace yardloc::testsupport;

namespace {

InvestmentDecision no_invest(const Instance& inst) {
  InvestmentDecision d;
  for (const auto& n : inst.nodes)
    if (n.is_potential) d.choice[n.id] = 0;
  return d;
}

// Seeded small instances for cross-checking solvers; keeps only cases whose
// choice space stays tiny.
std::vector<Instance> small_cases(int how_many, std::uint64_t salt) {
  std::vector<Instance> cases;
  for (std::uint64_t seed = 0; static_cast<int>(cases.size()) < how_many; ++seed) {
    GeneratorSpec spec;
    spec.node_count = 4;
    spec.potential_fraction = 0.5;
    spec.plans_per_node = 2;
    spec.demand_density = 0.35;
    spec.rng_seed = mix_seed(salt, seed);
    Instance inst = generate_instance(spec);
    if (inst.demands.size() < 2 || inst.demands.size() > 6) continue;
    cases.push_back(std::move(inst));
  }
  return cases;
}

}  // namespace

TEST_CASE("exact solver finds the relay optimum") {
  Instance inst = line3();
  Scenario sc = make_scenario(inst, no_invest(inst));
  TcsSolveConfig cfg;
  TcsPlan plan = solve_exact(sc, cfg);
  REQUIRE(plan.feasible);
  CHECK(plan.optimality == Optimality::ProvenOptimal);
  CHECK(plan.cost.z_total == 1200.0);
  const RouteChoice* rc = plan.assignment.find(inst.index_of("A"), inst.index_of("C"));
  REQUIRE(rc);
  CHECK(rc->via == inst.index_of("B"));
}

TEST_CASE("capacity squeeze forces direct shipping") {
  Instance inst = line3(50.0);
  Scenario sc = make_scenario(inst, no_invest(inst));
  TcsPlan plan = solve_exact(sc, {});
  REQUIRE(plan.feasible);
  CHECK(plan.cost.z_total == 1500.0);
  const RouteChoice* rc = plan.assignment.find(inst.index_of("A"), inst.index_of("C"));
  REQUIRE(rc);
  CHECK(rc->is_direct());
}

TEST_CASE("adjacent pair has a forced direct service") {
  Instance inst;
  inst.nodes = {yard("A", 9, 2, 100, 3), yard("B", 10, 2, 100, 3)};
  inst.itineraries[{"A", "B"}] = {};
  inst.demands = {{"A", "B", 60}};
  inst.finalize();
  Scenario sc = make_scenario(inst, no_invest(inst));
  TcsPlan plan = solve_exact(sc, {});
  REQUIRE(plan.feasible);
  CHECK(plan.cost.z_total == 9.0 * 50.0);
  CHECK(plan.assignment.route.size() == 1);
  CHECK(plan.assignment.route.begin()->second.is_direct());
}

TEST_CASE("cost ties resolve to the smallest choice vector") {
  // relay through B saves one 500 car-hour service but adds exactly 500 of
  // reclassification; the tie goes to the direct plan
  Instance inst = line3();
  inst.nodes[1].attrs.reclass_cost = 5.0;  // 100 cars * 5 = 500
  inst.finalize();
  Scenario sc = make_scenario(inst, no_invest(inst));
  TcsPlan plan = solve_exact(sc, {});
  REQUIRE(plan.feasible);
  CHECK(plan.cost.z_total == 1500.0);
  const RouteChoice* rc = plan.assignment.find(inst.index_of("A"), inst.index_of("C"));
  REQUIRE(rc);
  CHECK(rc->is_direct());
}

TEST_CASE("exact pair limit is enforced") {
  Instance inst = line3();
  TcsSolveConfig cfg;
  cfg.exact_pair_limit = 2;  // closure has 3 pairs
  Scenario sc = make_scenario(inst, no_invest(inst));
  CHECK_THROWS_AS(solve_exact(sc, cfg), SolveLimitError);
}

TEST_CASE("heuristic reaches the line optimum and respects only-feasible points") {
  Instance inst = line3();
  Scenario sc = make_scenario(inst, no_invest(inst));
  TcsSolveConfig cfg;
  cfg.mode = TcsSolveConfig::Mode::Heuristic;
  TcsPlan plan = solve_heuristic(sc, cfg);
  REQUIRE(plan.feasible);
  CHECK(plan.optimality == Optimality::HeuristicBest);
  CHECK(plan.cost.z_total == 1200.0);

  // no capacity anywhere: all-direct is the only feasible point
  Instance starved = line3(0.0);
  starved.nodes[0].attrs.capacity_total = 0;
  starved.nodes[2].attrs.capacity_total = 0;
  starved.finalize();
  Scenario ss = make_scenario(starved, no_invest(starved));
  TcsPlan sp = solve_heuristic(ss, cfg);
  REQUIRE(sp.feasible);
  CHECK(sp.cost.z_total == 1500.0);
  for (const auto& [pair, rc] : sp.assignment.route) CHECK(rc.is_direct());
}

TEST_CASE("track starvation is repaired by rerouting through a relay yard") {
  // X has two tracks for three outbound flows; sending X->R through P
  // merges it onto the X->P service
  Instance inst;
  inst.nodes = {yard("X", 10, 2, 500, 2), yard("P", 10, 2, 500, 4), yard("Q", 10, 2, 500, 4),
                yard("R", 10, 2, 500, 4)};
  inst.itineraries[{"X", "P"}] = {};
  inst.itineraries[{"X", "Q"}] = {};
  inst.itineraries[{"X", "R"}] = {"P"};
  inst.itineraries[{"P", "R"}] = {};
  inst.demands = {{"X", "P", 50}, {"X", "Q", 50}, {"X", "R", 50}};
  inst.economics.train_size_default = 50;
  inst.finalize();
  Scenario sc = make_scenario(inst, no_invest(inst));

  TcsSolveConfig cfg;
  cfg.mode = TcsSolveConfig::Mode::Heuristic;
  TcsPlan heur = solve_heuristic(sc, cfg);
  REQUIRE(heur.feasible);
  // X->P merged to 100 cars, X->Q, P->R: three services plus 50 cars
  // reclassified at P
  CHECK(heur.cost.z_total == 1600.0);
  const RouteChoice* rc = heur.assignment.find(inst.index_of("X"), inst.index_of("R"));
  REQUIRE(rc);
  CHECK(rc->via == inst.index_of("P"));

  TcsPlan exact = solve_exact(sc, {});
  REQUIRE(exact.feasible);
  CHECK(exact.cost.z_total == 1600.0);
}

TEST_CASE("infeasible instances surface track diagnostics") {
  // same starvation but with no relay anywhere: nothing can host the
  // third service
  Instance inst;
  inst.nodes = {yard("X", 10, 2, 500, 2), yard("P", 10, 2, 500, 4), yard("Q", 10, 2, 500, 4),
                yard("R", 10, 2, 500, 4)};
  inst.itineraries[{"X", "P"}] = {};
  inst.itineraries[{"X", "Q"}] = {};
  inst.itineraries[{"X", "R"}] = {};
  inst.demands = {{"X", "P", 50}, {"X", "Q", 50}, {"X", "R", 50}};
  inst.finalize();
  Scenario sc = make_scenario(inst, no_invest(inst));

  for (TcsSolveConfig::Mode mode :
       {TcsSolveConfig::Mode::Exact, TcsSolveConfig::Mode::Heuristic}) {
    TcsSolveConfig cfg;
    cfg.mode = mode;
    TcsPlan plan = solve_tcs(sc, cfg);
    CHECK_FALSE(plan.feasible);
    CHECK(plan.optimality == Optimality::Infeasible);
    REQUIRE_FALSE(plan.diagnostics.ok());
    CHECK(plan.diagnostics.violations.front().kind ==
          FeasibilityViolation::Kind::TracksExceeded);
  }
}

TEST_CASE("exact enumeration skips relay cycles from inconsistent itineraries") {
  Instance inst = line3();
  inst.itineraries[{"A", "B"}] = {"C"};
  inst.itineraries[{"C", "B"}] = {"A"};
  inst.itineraries[{"A", "C"}] = {};
  inst.demands = {{"A", "B", 30}, {"B", "C", 40}};
  inst.finalize();
  Scenario sc = make_scenario(inst, no_invest(inst));
  TcsPlan plan = solve_exact(sc, {});
  REQUIRE(plan.feasible);  // cyclic combinations exist but are skipped
  CHECK(plan.cost.z_total == 1000.0);  // both demands direct
}

TEST_CASE("heuristic never beats the exact optimum") {
  for (const Instance& inst : small_cases(20, 77)) {
    Scenario sc = make_scenario(inst, no_invest(inst));
    TcsSolveConfig exact_cfg;
    TcsSolveConfig heur_cfg;
    heur_cfg.mode = TcsSolveConfig::Mode::Heuristic;
    heur_cfg.rng_seed = 5;
    TcsPlan exact = solve_exact(sc, exact_cfg);
    TcsPlan heur = solve_heuristic(sc, heur_cfg);
    REQUIRE(exact.feasible);  // generator promises a feasible all-direct plan
    REQUIRE(heur.feasible);
    CHECK(heur.cost.z_total >= exact.cost.z_total - 1e-9);
    CHECK(check_feasibility(sc, heur.assignment, heur.flows).ok());
    CHECK(check_feasibility(sc, exact.assignment, exact.flows).ok());
  }
}

TEST_CASE("exact matches the naive recursion oracle") {
  for (const Instance& inst : small_cases(25, 13)) {
    InvestmentDecision d = no_invest(inst);
    Scenario sc = make_scenario(inst, d);
    TcsPlan plan = solve_exact(sc, {});
    auto reference = oracle::naive_best_cost(inst, d);
    REQUIRE(plan.feasible);
    REQUIRE(reference.has_value());
    CHECK(plan.cost.z_total ==
          doctest::Approx(*reference).epsilon(1e-9));
  }
}

TEST_CASE("solver determinism and kernel equivalence") {
  Instance inst = line3();
  Scenario sc = make_scenario(inst, no_invest(inst));

  TcsSolveConfig heur;
  heur.mode = TcsSolveConfig::Mode::Heuristic;
  heur.rng_seed = 99;
  CHECK(solve_heuristic(sc, heur).to_string(inst) == solve_heuristic(sc, heur).to_string(inst));

  for (const Instance& gen : small_cases(10, 21)) {
    Scenario gs = make_scenario(gen, no_invest(gen));
    PairClosure closure = build_closure(gen);
    TcsPlan serial = detail::enumerate_exact_serial(gs, closure);
    TcsPlan parallel = detail::enumerate_exact_parallel(gs, closure, 4);
    CHECK(serial.to_string(gen) == parallel.to_string(gen));

    TcsSolveConfig h1;
    h1.mode = TcsSolveConfig::Mode::Heuristic;
    h1.rng_seed = 7;
    h1.threads = 1;
    TcsSolveConfig h4 = h1;
    h4.threads = 4;
    CHECK(solve_heuristic(gs, h1).to_string(gen) == solve_heuristic(gs, h4).to_string(gen));
  }
}

TEST_CASE("capacity headroom never hurts the optimum") {
  for (const Instance& base : small_cases(8, 55)) {
    Scenario sc = make_scenario(base, no_invest(base));
    double reference = solve_exact(sc, {}).cost.z_total;
    for (double delta : {10.0, 500.0}) {
      Instance roomy = base;
      for (auto& n : roomy.nodes) {
        n.attrs.capacity_total += delta;
        n.attrs.tracks_total += static_cast<int>(delta / 10);
      }
      roomy.finalize();
      Scenario sr = make_scenario(roomy, no_invest(roomy));
      CHECK(solve_exact(sr, {}).cost.z_total <= reference + 1e-9);
    }
  }
}

TEST_CASE("a no-investment decision is the pre-investment instance") {
  Instance inst = line3();
  Node& b = inst.nodes[1];
  b.is_potential = true;
  b.plans = {{1000, 20, 0.5, 250, 2}};
  inst.finalize();

  Instance plain = line3();  // same yards, no investment machinery
  Scenario with_choice = make_scenario(inst, no_invest(inst));
  Scenario bare = make_scenario(plain, {});
  CHECK(evaluate_z(with_choice, {}) == evaluate_z(bare, {}));
}

TEST_CASE("evaluate_z dispatches and propagates infeasibility") {
  Instance inst = line3();
  Scenario sc = make_scenario(inst, no_invest(inst));
  CHECK(evaluate_z(sc, {}) == 1200.0);

  Instance empty = line3();
  empty.demands.clear();
  Scenario se = make_scenario(empty, no_invest(empty));
  CHECK(evaluate_z(se, {}) == 0.0);

  Instance blocked = line3();
  blocked.nodes[0].attrs.tracks_total = 0;  // A cannot dispatch anything
  blocked.finalize();
  Scenario sb = make_scenario(blocked, no_invest(blocked));
  CHECK_THROWS_AS(evaluate_z(sb, {}), InfeasibleError);
  TcsPlan plan = solve_exact(sb, {});
  CHECK_FALSE(plan.feasible);
  CHECK(plan.optimality == Optimality::Infeasible);
  CHECK_FALSE(plan.diagnostics.ok());
}
