#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace seqcp {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to turn (seed, domain, index) into
/// well-separated engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream domains keep independent uses of one master seed apart.
enum class StreamDomain : std::uint64_t {
  LimitPaths = 1,
  Scenario = 2,
  Calibration = 3,
  Synthetic = 4,
};

/// Engine for replication `index` of `domain` under `master_seed`. The result
/// depends only on the three inputs, never on which thread draws it.
inline Rng make_stream(std::uint64_t master_seed, StreamDomain domain,
                       std::uint64_t index) {
  std::uint64_t s = splitmix64(master_seed);
  s = splitmix64(s ^ static_cast<std::uint64_t>(domain));
  s = splitmix64(s + index);
  return Rng(s);
}

}  // namespace seqcp
