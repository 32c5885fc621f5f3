#include "yardloc/instance.hpp"

#include <algorithm>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace yardloc {

void Instance::finalize() {
  index.clear();
  for (int i = 0; i < node_count(); ++i) index.emplace(nodes[static_cast<size_t>(i)].id, i);

  by_rank.resize(nodes.size());
  for (int i = 0; i < node_count(); ++i) by_rank[static_cast<size_t>(i)] = i;
  std::sort(by_rank.begin(), by_rank.end(), [&](int a, int b) {
    return nodes[static_cast<size_t>(a)].id < nodes[static_cast<size_t>(b)].id;
  });
  rank.assign(nodes.size(), 0);
  for (int r = 0; r < node_count(); ++r) rank[static_cast<size_t>(by_rank[static_cast<size_t>(r)])] = r;
}

u128 count_investment_combinations(const Instance& inst, bool include_no_invest) {
  constexpr u128 kMax = ~static_cast<u128>(0);
  u128 count = 1;
  for (const auto& n : inst.nodes) {
    if (!n.is_potential) continue;
    u128 options = n.plans.size() + (include_no_invest ? 1 : 0);
    if (options == 0) return 0;
    if (count > kMax / options)
      throw CountOverflowError("combination count exceeds 128-bit range");
    count *= options;
  }
  return count;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("YARDLOC_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) return static_cast<int>(std::min<long>(cap, 256));
  }
  int n = 1;
#ifdef _OPENMP
  n = omp_get_max_threads();
#endif
  return std::max(1, n);
}

}  // namespace yardloc
