#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace mfg::rng {

/// Identifier recorded in run metadata so outputs are reproducible.
inline constexpr const char* kAlgorithm = "splitmix64-counter";

/// SplitMix64 finalizer (Stafford mix 13).
constexpr std::uint64_t finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct SplitMix64 {
  std::uint64_t state;

  explicit constexpr SplitMix64(std::uint64_t s) : state(s) {}

  constexpr std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    return finalize(state);
  }

  /// Uniform double in [0, 1).
  double next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
};

/// Counter-based stream key: one independent SplitMix64 stream per
/// (seed, step, agent) triple, so draws do not depend on evaluation order
/// or thread count.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t step,
                                   std::uint64_t agent) {
  std::uint64_t h = finalize(seed + 0x9e3779b97f4a7c15ULL);
  h = finalize(h ^ (step + 0xbf58476d1ce4e5b9ULL));
  h = finalize(h ^ (agent + 0x94d049bb133111ebULL));
  return h;
}

/// Standard-normal pair via Box-Muller; the first uniform is mapped to
/// (0, 1] so the logarithm is always finite.
inline std::array<double, 2> normal_pair(SplitMix64& g) {
  const double u1 = 1.0 - g.next_unit();
  const double u2 = g.next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * 3.14159265358979323846 * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace mfg::rng
