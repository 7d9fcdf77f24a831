#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>

namespace tfec {

using Rng = std::mt19937_64;

/// Mixes a base seed with a list of stream identifiers (epoch, sample index,
/// ...) so that independent consumers get reproducible, decorrelated streams
/// regardless of the order in which they run.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  auto splitmix = [](std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  };
  std::uint64_t h = splitmix(seed);
  for (auto s : stream) h = splitmix(h ^ splitmix(s + 0x632BE59BD9B4E019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {}) {
  return Rng(derive_seed(seed, stream));
}

/// Uniform integer in [lo, hi]. std::uniform_int_distribution is not
/// specified bit-for-bit across standard libraries; this one is.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t span = hi - lo + 1;
  if (span == 0) return rng();  // full 64-bit range
  const std::uint64_t limit = Rng::max() - (Rng::max() % span);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return lo + x % span;
}

/// Uniform real in [0, 1) with 53 bits of mantissa.
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Standard normal draw via Box-Muller (one value per call, no caching).
double standard_normal(Rng& rng);

/// Fisher-Yates shuffle built on uniform_index.
template <typename It>
void shuffle(It first, It last, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = uniform_index(rng, 0, i - 1);
    std::swap(first[i - 1], first[j]);
  }
}

}  // namespace tfec
