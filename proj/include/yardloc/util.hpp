#pragma once

#include <charconv>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace yardloc {

// Canonical number rendering: shortest decimal string that round-trips the
// exact double value. Locale-independent, used by every text output so that
// reports and logs are byte-stable.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_number(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("malformed number: '" + s + "'");
  return v;
}

using u128 = unsigned __int128;

inline std::string u128_to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

// Worker count for parallel kernels: explicit request wins, then the
// YARDLOC_THREADS environment cap, then the OpenMP default.
int resolve_threads(int requested);

// splitmix64; used to derive independent per-worker seeds from one 64-bit
// seed so results do not depend on execution interleaving.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Platform-stable draws (std::uniform_*_distribution is implementation
// defined, which would break byte-reproducible generation).
inline std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n) {
  return n == 0 ? 0 : rng() % n;
}

inline std::int64_t rand_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rand_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

inline double rand_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double rand_real(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * rand_unit(rng);
}

}  // namespace yardloc
