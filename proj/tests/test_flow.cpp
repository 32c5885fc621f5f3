#include <algorithm>
#include <cmath>
#include <doctest.h>

#include "oracle.hpp"
#include "support.hpp"
#include "yardloc/flow.hpp"
#include "yardloc/generator.hpp"
#include "yardloc/tcs_solver.hpp"

using namespace yardloc;
using namespace yardloc::testsupport;

namespace {

InvestmentDecision no_invest(const Instance& inst) {
  InvestmentDecision d;
  for (const auto& n : inst.nodes)
    if (n.is_potential) d.choice[n.id] = 0;
  return d;
}

TcsAssignment via_b_assignment(const Instance& inst) {
  TcsAssignment asg;
  int a = inst.index_of("A"), b = inst.index_of("B"), c = inst.index_of("C");
  asg.set_via(a, c, b);
  asg.set_direct(a, b);
  asg.set_direct(b, c);
  return asg;
}

TcsAssignment all_direct_demands(const Instance& inst) {
  TcsAssignment asg;
  for (const auto& d : inst.demands)
    asg.set_direct(inst.index_of(d.origin), inst.index_of(d.destination));
  return asg;
}

}  // namespace

TEST_CASE("relay flows on the three-yard line") {
  Instance inst = line3();
  Scenario sc = make_scenario(inst, no_invest(inst));
  FlowState fs = compute_flows(sc, via_b_assignment(inst));
  int a = inst.index_of("A"), b = inst.index_of("B"), c = inst.index_of("C");
  CHECK(fs.flow(b, c) == 170.0);
  CHECK(fs.workload[static_cast<size_t>(b)] == 100.0);
  CHECK(fs.service(a, b) == 150.0);
  CHECK(fs.service(b, c) == 170.0);
  CHECK(fs.service(a, c) == 0.0);
  CHECK(fs.provided_services.count({a, c}) == 0);
  CHECK(fs.provided_services.size() == 2);
}

TEST_CASE("all-direct flows carry demand only") {
  Instance inst = line3();
  Scenario sc = make_scenario(inst, no_invest(inst));
  FlowState fs = compute_flows(sc, all_direct_demands(inst));
  for (const auto& d : inst.demands) {
    int i = inst.index_of(d.origin), j = inst.index_of(d.destination);
    CHECK(fs.flow(i, j) == d.volume);
    CHECK(fs.service(i, j) == d.volume);
  }
  for (double w : fs.workload) CHECK(w == 0.0);
}

TEST_CASE("empty demand set yields empty flows") {
  Instance inst = line3();
  inst.demands.clear();
  Scenario sc = make_scenario(inst, no_invest(inst));
  FlowState fs = compute_flows(sc, {});
  CHECK(fs.f.empty());
  CHECK(fs.service_flow.empty());
  CHECK(fs.provided_services.empty());
}

TEST_CASE("flow errors") {
  Instance inst = line3();
  // relay loop between A and C toward destination B
  inst.itineraries[{"A", "B"}] = {"C"};
  inst.itineraries[{"C", "B"}] = {"A"};
  inst.demands = {{"A", "B", 10}};
  inst.finalize();
  Scenario sc = make_scenario(inst, no_invest(inst));
  int a = inst.index_of("A"), b = inst.index_of("B"), c = inst.index_of("C");
  TcsAssignment cyc;
  cyc.set_via(a, b, c);
  cyc.set_via(c, b, a);
  CHECK_THROWS_AS(compute_flows(sc, cyc), FlowError);
  try {
    compute_flows(sc, cyc);
  } catch (const FlowError& e) {
    CHECK(e.kind == FlowError::Kind::RoutingCycle);
  }

  Instance base = line3();
  Scenario sc2 = make_scenario(base, no_invest(base));
  TcsAssignment missing;
  missing.set_via(base.index_of("A"), base.index_of("C"), base.index_of("B"));
  missing.set_direct(base.index_of("A"), base.index_of("B"));
  // no entry for B->C, which receives relayed flow
  try {
    compute_flows(sc2, missing);
    FAIL("expected FlowError");
  } catch (const FlowError& e) {
    CHECK(e.kind == FlowError::Kind::UnassignedPair);
    CHECK(e.pair == NodePair{base.index_of("B"), base.index_of("C")});
  }
}

TEST_CASE("track demand function") {
  TrackFn step{TrackFn::Kind::Step, {}};
  TrackFn linear{TrackFn::Kind::Linear, {}};
  CHECK(track_demand(200, step) == 1.0);
  CHECK(track_demand(201, step) == 2.0);
  CHECK(track_demand(0, step) == 0.0);
  CHECK(track_demand(400, linear) == 2.0);
  CHECK(track_demand(0, linear) == 0.0);

  TrackFn finite{TrackFn::Kind::Step, {200, 400}};
  CHECK(track_demand(350, finite) == 2.0);
  CHECK_THROWS_AS(track_demand(401, finite), TrackOverflowError);
}

TEST_CASE("step equals rounded-up linear on integers") {
  TrackFn step{TrackFn::Kind::Step, {}};
  TrackFn linear{TrackFn::Kind::Linear, {}};
  double prev_step = 0.0, prev_lin = 0.0;
  for (int d = 1; d <= 2000; ++d) {
    double s = track_demand(d, step);
    double l = track_demand(d, linear);
    CHECK(s == std::ceil(static_cast<double>(d) / 200.0));
    CHECK(s - l >= 0.0);
    CHECK(s - l < 1.0);
    CHECK(s >= prev_step);
    CHECK(l >= prev_lin);
    prev_step = s;
    prev_lin = l;
  }
}

TEST_CASE("feasibility violations") {
  Instance tight = line3(80.0);  // relay through B needs 100
  Scenario sc = make_scenario(tight, no_invest(tight));
  TcsAssignment asg = via_b_assignment(tight);
  FlowState fs = compute_flows(sc, asg);
  FeasibilityReport rep = check_feasibility(sc, asg, fs);
  REQUIRE(rep.violations.size() == 1);
  const auto& v = rep.violations.front();
  CHECK(v.kind == FeasibilityViolation::Kind::CapacityExceeded);
  CHECK(v.node == tight.index_of("B"));
  CHECK(v.lhs == 100.0);
  CHECK(v.rhs == 80.0);

  // three 50-car services out of a two-track yard
  Instance fan;
  fan.nodes = {yard("X", 10, 2, 500, 2), yard("P", 10, 2, 500, 4), yard("Q", 10, 2, 500, 4),
               yard("R", 10, 2, 500, 4)};
  fan.itineraries[{"X", "P"}] = {};
  fan.itineraries[{"X", "Q"}] = {};
  fan.itineraries[{"X", "R"}] = {};
  fan.demands = {{"X", "P", 50}, {"X", "Q", 50}, {"X", "R", 50}};
  fan.finalize();
  Scenario sf = make_scenario(fan, no_invest(fan));
  TcsAssignment da = all_direct_demands(fan);
  FlowState ff = compute_flows(sf, da);
  FeasibilityReport rf = check_feasibility(sf, da, ff);
  REQUIRE(rf.violations.size() == 1);
  CHECK(rf.violations.front().kind == FeasibilityViolation::Kind::TracksExceeded);
  CHECK(rf.violations.front().lhs == 3.0);
  CHECK(rf.violations.front().rhs == 2.0);

  // ample tracks: all-direct is clean
  Instance ok = line3();
  Scenario so = make_scenario(ok, no_invest(ok));
  TcsAssignment ad = all_direct_demands(ok);
  CHECK(check_feasibility(so, ad, compute_flows(so, ad)).ok());
}

TEST_CASE("operating cost") {
  // one provided service, no reclassification
  Instance single;
  single.nodes = {yard("A", 12, 2, 500, 4), yard("B", 10, 2, 500, 4)};
  single.itineraries[{"A", "B"}] = {};
  single.demands = {{"A", "B", 40}};
  single.finalize();
  Scenario sc = make_scenario(single, no_invest(single));
  TcsAssignment asg = all_direct_demands(single);
  CostBreakdown cb = operating_cost(sc, compute_flows(sc, asg));
  CHECK(cb.accumulation == 600.0);
  CHECK(cb.reclassification == 0.0);
  CHECK(cb.z_total == 600.0);

  Instance inst = line3();
  Scenario s3 = make_scenario(inst, no_invest(inst));
  TcsAssignment via = via_b_assignment(inst);
  CostBreakdown via_cost = operating_cost(s3, compute_flows(s3, via));
  CHECK(via_cost.accumulation == 1000.0);
  CHECK(via_cost.reclassification == 200.0);
  CHECK(via_cost.z_total == 1200.0);

  TcsAssignment direct = all_direct_demands(inst);
  CostBreakdown direct_cost = operating_cost(s3, compute_flows(s3, direct));
  CHECK(direct_cost.z_total == 1500.0);

  Instance empty = line3();
  empty.demands.clear();
  Scenario se = make_scenario(empty, no_invest(empty));
  CHECK(operating_cost(se, compute_flows(se, {})).z_total == 0.0);
}

TEST_CASE("train size overrides feed the accumulation charge") {
  Instance inst = line3();
  inst.economics.train_size_overrides[{"A", "B"}] = 30;
  Scenario sc = make_scenario(inst, no_invest(inst));
  TcsAssignment via = via_b_assignment(inst);
  CostBreakdown cb = operating_cost(sc, compute_flows(sc, via));
  // A->B shrinks from 10*50 to 10*30
  CHECK(cb.accumulation == 800.0);
}

TEST_CASE("conservation against chain walking") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GeneratorSpec spec;
    spec.node_count = 5;
    spec.demand_density = 0.35;
    spec.rng_seed = seed;
    Instance inst = generate_instance(spec);
    Scenario sc = make_scenario(inst, no_invest(inst));

    TcsSolveConfig cfg;
    cfg.mode = TcsSolveConfig::Mode::Heuristic;
    cfg.rng_seed = seed;
    cfg.restarts = 3;
    TcsPlan plan = solve_heuristic(sc, cfg);
    if (!plan.feasible) continue;

    std::vector<double> expected = oracle::chain_workloads(inst, plan.assignment);
    for (int k = 0; k < inst.node_count(); ++k)
      CHECK(plan.flows.workload[static_cast<size_t>(k)] ==
            doctest::Approx(expected[static_cast<size_t>(k)]).epsilon(1e-12));

    // every car leaving a yard rides exactly one service
    for (int i = 0; i < inst.node_count(); ++i) {
      double out_f = 0.0, out_d = 0.0;
      for (const auto& [pair, v] : plan.flows.f)
        if (pair.first == i) out_f += v;
      for (const auto& [pair, v] : plan.flows.service_flow)
        if (pair.first == i) out_d += v;
      CHECK(out_f == doctest::Approx(out_d).epsilon(1e-12));
    }

    // accumulation charges exactly the provided services
    double acc = 0.0;
    for (const auto& pair : plan.flows.provided_services)
      acc += inst.node(pair.first).attrs.accumulation_param *
             inst.train_size(inst.node(pair.first).id, inst.node(pair.second).id);
    CHECK(plan.cost.accumulation == doctest::Approx(acc).epsilon(1e-12));
  }
}

TEST_CASE("two-hop relay chains propagate correctly") {
  Instance inst;
  inst.nodes = {yard("A", 10, 2, 500, 4), yard("B", 10, 2, 500, 4), yard("C", 10, 2, 500, 4),
                yard("D", 10, 2, 500, 4)};
  inst.itineraries[{"A", "D"}] = {"B", "C"};
  inst.itineraries[{"B", "D"}] = {"C"};
  inst.itineraries[{"C", "D"}] = {};
  inst.demands = {{"A", "D", 60}};
  inst.economics.train_size_default = 50;
  inst.finalize();
  int a = inst.index_of("A"), b = inst.index_of("B"), c = inst.index_of("C"),
      d = inst.index_of("D");

  Scenario sc = make_scenario(inst, {});
  TcsAssignment asg;
  asg.set_via(a, d, b);
  asg.set_via(b, d, c);
  asg.set_direct(c, d);
  FlowState fs = compute_flows(sc, asg);

  CHECK(fs.flow(a, d) == 60.0);
  CHECK(fs.flow(b, d) == 60.0);
  CHECK(fs.flow(c, d) == 60.0);
  CHECK(fs.workload[static_cast<size_t>(b)] == 60.0);
  CHECK(fs.workload[static_cast<size_t>(c)] == 60.0);
  CHECK(fs.service(a, b) == 60.0);
  CHECK(fs.service(b, c) == 60.0);
  CHECK(fs.service(c, d) == 60.0);
  CHECK(fs.provided_services.size() == 3);

  CostBreakdown cb = operating_cost(sc, fs);
  CHECK(cb.accumulation == 1500.0);        // three services at 10 * 50
  CHECK(cb.reclassification == 240.0);     // 60 cars sorted twice at tau 2
  CHECK(cb.z_total == 1740.0);
}

TEST_CASE("flow state is independent of declaration order") {
  Instance inst = line3();
  Instance shuffled = line3();
  std::reverse(shuffled.demands.begin(), shuffled.demands.end());
  Scenario s1 = make_scenario(inst, no_invest(inst));
  Scenario s2 = make_scenario(shuffled, no_invest(shuffled));

  // identical route content inserted in different orders
  TcsAssignment a1 = via_b_assignment(inst);
  TcsAssignment a2;
  a2.set_direct(inst.index_of("B"), inst.index_of("C"));
  a2.set_direct(inst.index_of("A"), inst.index_of("B"));
  a2.set_via(inst.index_of("A"), inst.index_of("C"), inst.index_of("B"));

  CHECK(compute_flows(s1, a1) == compute_flows(s2, a2));
}

TEST_CASE("scenario effective attributes") {
  Instance inst = line3();
  Node& b = inst.nodes[1];
  b.is_potential = true;
  b.plans = {{1000, 20, 0.5, 250, 2}};
  inst.finalize();

  InvestmentDecision keep = no_invest(inst);
  Scenario s0 = make_scenario(inst, keep);
  CHECK(s0.effective_capacity[1] == 500.0);
  CHECK(s0.effective_tracks[1] == 4.0);
  CHECK(s0.effective_tau[1] == 2.0);

  InvestmentDecision invest;
  invest.choice["B"] = 1;
  Scenario s1 = make_scenario(inst, invest);
  CHECK(s1.effective_capacity[1] == 750.0);
  CHECK(s1.effective_tracks[1] == 6.0);
  CHECK(s1.effective_tau[1] == 0.5);

  InvestmentDecision bad;
  bad.choice["B"] = 2;
  CHECK_THROWS_AS(make_scenario(inst, bad), std::invalid_argument);
  InvestmentDecision extra = invest;
  extra.choice["A"] = 0;
  CHECK_THROWS_AS(make_scenario(inst, extra), std::invalid_argument);
  CHECK_THROWS_AS(make_scenario(inst, InvestmentDecision{}), std::invalid_argument);
}
