#pragma once

#include <cstdint>
#include <string_view>

namespace corespect {

// Deterministic random number generation.
//
// Everything randomized in this library draws from Rng, which is xoshiro256++
// seeded through splitmix64. We do not use <random>'s distributions because
// their output is implementation-defined; with the draws below, "same seed,
// same bytes" holds across compilers and standard libraries.
//
// Sub-streams: a run owns one root seed and derives an independent generator
// per pipeline stage (and per repetition) via split(). Stage randomness is
// therefore insensitive to how much entropy earlier stages consumed.

std::uint64_t splitmix64_next(std::uint64_t& state);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [0, n); n must be positive. Rejection sampling, no
  // modulo bias.
  std::uint64_t uniform_int(std::uint64_t n);
  // Standard normal via Box-Muller. Generates pairs, caches the second value.
  double normal();

  // Independent generator for a named stage, derived from this generator's
  // root seed only (never from its current position).
  Rng split(std::string_view stream) const;
  // As above with a repetition / index component.
  Rng split(std::string_view stream, std::uint64_t index) const;

  std::uint64_t root_seed() const { return root_; }

 private:
  std::uint64_t s_[4];
  std::uint64_t root_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace corespect
