#include "yardloc/itinerary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace yardloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool tight(double total, double step, double rest) {
  double sum = step + rest;
  return std::abs(total - sum) <= 1e-12 * std::max({1.0, std::abs(total), std::abs(sum)});
}

struct Walker {
  const Instance& inst;
  const std::vector<std::vector<std::pair<int, double>>>& adj;
  const std::vector<double>& dist;  // to destination
  int dest;
  long steps = 0;

  // Smallest-id-first DFS over tight edges; backtracking only matters when
  // zero-length edges create equal-distance pockets.
  bool walk(int cur, std::vector<int>& path, std::vector<char>& on_path) {
    if (++steps > 1000L * inst.node_count() + 1000L)
      throw ItineraryError("itinerary derivation did not terminate (zero-length edge tangle)");
    if (cur == dest) return true;
    std::vector<int> cand;
    for (const auto& [v, w] : adj[static_cast<size_t>(cur)]) {
      if (on_path[static_cast<size_t>(v)]) continue;
      if (dist[static_cast<size_t>(v)] == kInf) continue;
      if (tight(dist[static_cast<size_t>(cur)], w, dist[static_cast<size_t>(v)]))
        cand.push_back(v);
    }
    std::sort(cand.begin(), cand.end(),
              [&](int a, int b) { return inst.node(a).id < inst.node(b).id; });
    for (int v : cand) {
      path.push_back(v);
      on_path[static_cast<size_t>(v)] = 1;
      if (walk(v, path, on_path)) return true;
      on_path[static_cast<size_t>(v)] = 0;
      path.pop_back();
    }
    return false;
  }
};

}  // namespace

void derive_itineraries(Instance& inst) {
  if (inst.edges.empty()) return;
  const int n = inst.node_count();

  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<size_t>(n));
  for (const auto& e : inst.edges) {
    if (e.length < 0)
      throw ItineraryError("negative edge length on " + e.a + "-" + e.b);
    int ia = inst.index_of(e.a), ib = inst.index_of(e.b);
    if (ia < 0 || ib < 0) throw ItineraryError("edge references unknown node");
    adj[static_cast<size_t>(ia)].push_back({ib, e.length});
    adj[static_cast<size_t>(ib)].push_back({ia, e.length});
  }

  // One shortest-path tree per destination, then the lexicographically
  // smallest tight path for every connected source.
  for (int j = 0; j < n; ++j) {
    std::vector<double> dist(static_cast<size_t>(n), kInf);
    dist[static_cast<size_t>(j)] = 0.0;
    using QE = std::pair<double, int>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
    pq.push({0.0, j});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[static_cast<size_t>(u)]) continue;
      for (const auto& [v, w] : adj[static_cast<size_t>(u)]) {
        if (d + w < dist[static_cast<size_t>(v)]) {
          dist[static_cast<size_t>(v)] = d + w;
          pq.push({d + w, v});
        }
      }
    }

    for (int i = 0; i < n; ++i) {
      if (i == j || dist[static_cast<size_t>(i)] == kInf) continue;
      ItineraryKey key{inst.node(i).id, inst.node(j).id};
      if (inst.itineraries.count(key)) continue;  // explicit entries win

      std::vector<int> path{i};
      std::vector<char> on_path(static_cast<size_t>(n), 0);
      on_path[static_cast<size_t>(i)] = 1;
      Walker walker{inst, adj, dist, j};
      if (!walker.walk(i, path, on_path))
        throw ItineraryError("no tight path from " + key.first + " to " + key.second);

      std::vector<NodeId> via;
      for (size_t p = 1; p + 1 < path.size(); ++p) via.push_back(inst.node(path[p]).id);
      inst.itineraries.emplace(std::move(key), std::move(via));
    }
  }

  for (const auto& d : inst.demands) {
    if (d.origin != d.destination && !inst.itinerary(d.origin, d.destination))
      throw ItineraryError("demand pair " + d.origin + "->" + d.destination +
                           " is disconnected from the edge network");
  }
}

}  // namespace yardloc
