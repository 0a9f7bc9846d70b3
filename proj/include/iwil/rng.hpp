#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace iwil {

using Rng = std::mt19937_64;

/// Named sub-streams. Every random draw in the library comes from a generator
/// seeded with derive_seed(run_seed, {stream, ...}), so adding a consumer never
/// shifts the draws of another.
enum class Stream : std::uint64_t {
  kInit = 1,
  kTrainRollout = 2,
  kCorrupt = 3,
  kTestRollout = 4,
  kEval = 5,
  kTheme = 6,
  kTrack = 7,
  kTask = 8,
  kStart = 9,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t t : tags) h = splitmix64(h ^ splitmix64(t));
  return h;
}

constexpr std::uint64_t tag(Stream s) { return static_cast<std::uint64_t>(s); }

inline Rng make_rng(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  return Rng(derive_seed(base, tags));
}

}  // namespace iwil
