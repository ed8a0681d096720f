#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "geoscout/core.hpp"

namespace geoscout {

// xoshiro256** (Blackman & Vigna) seeded through splitmix64. All derived
// distributions below use only integer ops and IEEE basic arithmetic plus
// log/sqrt/cos, so streams are reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n);
  // Uniform integer in [lo, hi] (inclusive).
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  // Uniform double in [0, 1) with 53 random bits.
  double uniform();
  // Standard normal via Box-Muller (one value per call, no caching).
  double normal();

 private:
  std::array<std::uint64_t, 4> s_{};
};

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t fnv1a64(std::string_view bytes);

// Stable per-case seed from (dataset seed, source id, task kind, case index).
std::uint64_t derive_seed(std::uint64_t dataset_seed, std::string_view source_id, TaskKind kind,
                          std::uint64_t case_index);

}  // namespace geoscout
