#include "yardloc/generator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "yardloc/flow.hpp"
#include "yardloc/itinerary.hpp"
#include "yardloc/util.hpp"

namespace yardloc {

namespace {

std::string node_name(int i, int width) {
  std::string num = std::to_string(i + 1);
  while (static_cast<int>(num.size()) < width) num.insert(num.begin(), '0');
  return "Y" + num;
}

}  // namespace

Instance generate_instance(const GeneratorSpec& spec) {
  if (spec.node_count < 2)
    throw GeneratorError("node_count must be at least 2");
  if (spec.potential_fraction < 0 || spec.potential_fraction > 1)
    throw GeneratorError("potential_fraction must be in [0,1]");
  if (spec.plans_per_node < 0) throw GeneratorError("plans_per_node must be >= 0");
  if (spec.demand_density < 0 || spec.demand_density > 1)
    throw GeneratorError("demand_density must be in [0,1]");
  if (!(spec.capacity_slack > 0)) throw GeneratorError("capacity_slack must be > 0");

  std::mt19937_64 rng(spec.rng_seed);
  const int n = spec.node_count;
  const int width = static_cast<int>(std::to_string(n).size());

  Instance inst;
  inst.nodes.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    inst.nodes[static_cast<size_t>(i)].id = node_name(i, width);
    inst.nodes[static_cast<size_t>(i)].is_original_yard = true;
  }

  // Corridor topology: a main line over a random node order plus a few
  // chords. Long itineraries are what make relay choices interesting.
  std::set<std::pair<int, int>> edge_set;
  auto add_edge = [&](int a, int b, double len) {
    if (a > b) std::swap(a, b);
    if (a == b || !edge_set.insert({a, b}).second) return;
    inst.edges.push_back(
        {inst.nodes[static_cast<size_t>(a)].id, inst.nodes[static_cast<size_t>(b)].id, len});
  };
  std::vector<int> line(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) line[static_cast<size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(i + 1)));
    std::swap(line[static_cast<size_t>(i)], line[static_cast<size_t>(j)]);
  }
  for (int i = 1; i < n; ++i)
    add_edge(line[static_cast<size_t>(i - 1)], line[static_cast<size_t>(i)],
             static_cast<double>(rand_int(rng, 1, 9)));
  for (int t = 0; t < n / 4; ++t) {
    int a = static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(n)));
    int b = static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(n)));
    add_edge(a, b, static_cast<double>(rand_int(rng, 1, 9)));
  }

  // Which yards can be improved.
  int k = static_cast<int>(std::llround(spec.potential_fraction * n));
  k = std::max(0, std::min(n, k));
  std::vector<int> perm(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]);
  }
  for (int p = 0; p < k; ++p) inst.nodes[static_cast<size_t>(perm[static_cast<size_t>(p)])].is_potential = true;

  double total_volume = 0.0;
  double max_volume = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (rand_unit(rng) >= spec.demand_density) continue;
      double volume = static_cast<double>(rand_int(rng, 20, 180));
      inst.demands.push_back({inst.nodes[static_cast<size_t>(i)].id,
                              inst.nodes[static_cast<size_t>(j)].id, volume});
      total_volume += volume;
      max_volume = std::max(max_volume, volume);
    }
  }

  // Attributes sized off the all-direct baseline so it is always feasible;
  // the slack headroom is what makes relay routings possible at all.
  inst.finalize();
  std::vector<double> direct_tracks(static_cast<size_t>(n), 0.0);
  TrackFn default_step;  // step with default rungs
  for (const auto& d : inst.demands)
    direct_tracks[static_cast<size_t>(inst.index_of(d.origin))] +=
        track_demand(d.volume, default_step);

  const int extra_tracks = std::max(1, static_cast<int>(std::llround(spec.capacity_slack)));
  const double mean_volume =
      inst.demands.empty() ? 0.0 : total_volume / static_cast<double>(inst.demands.size());
  const double cap_base = std::llround(spec.capacity_slack * (max_volume + mean_volume));

  for (int i = 0; i < n; ++i) {
    Node& node = inst.nodes[static_cast<size_t>(i)];
    YardAttributes& a = node.attrs;
    a.accumulation_param = static_cast<double>(rand_int(rng, 6, 12));
    a.reclass_cost = static_cast<double>(rand_int(rng, 1, 4));
    a.tracks_local = static_cast<int>(rand_below(rng, 2));
    a.tracks_total = a.tracks_local +
                     static_cast<int>(direct_tracks[static_cast<size_t>(i)]) + extra_tracks;
    a.capacity_local = static_cast<double>(rand_int(rng, 0, 50));
    a.capacity_total = a.capacity_local + cap_base;
  }

  double max_plan_cost_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    Node& node = inst.nodes[static_cast<size_t>(i)];
    if (!node.is_potential) continue;
    double node_max = 0.0;
    for (int p = 0; p < spec.plans_per_node; ++p) {
      InvestmentPlan plan;
      plan.cost = static_cast<double>(rand_int(rng, 5, 30)) * 100.0;
      plan.lifetime_years = static_cast<int>(rand_int(rng, 10, 30));
      plan.reclass_cost_after =
          node.attrs.reclass_cost * static_cast<double>(rand_int(rng, 3, 8)) / 10.0;
      plan.capacity_gain = static_cast<double>(rand_int(rng, 1, 5)) * 100.0;
      plan.tracks_gain = static_cast<int>(rand_int(rng, 1, 3));
      node_max = std::max(node_max, plan.cost);
      node.plans.push_back(plan);
    }
    max_plan_cost_sum += node_max;
  }

  EconomicParams& ec = inst.economics;
  ec.budget = std::floor(0.5 * max_plan_cost_sum);
  const double rates[] = {0.05, 0.08, 0.1};
  ec.discount_rate = rates[rand_below(rng, 3)];
  const double alphas[] = {0.5, 1.0, 1.5};
  ec.car_hour_value = alphas[rand_below(rng, 3)];
  ec.day_count = 365;
  ec.train_size_default = static_cast<double>(rand_int(rng, 40, 60));
  ec.track_fn.kind = TrackFn::Kind::Step;

  derive_itineraries(inst);
  inst.finalize();
  return inst;
}

}  // namespace yardloc
