#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace urec {

// Counter-based splitmix64 generator. Chosen over std::mt19937 because the
// whole experiment protocol hinges on seeds that are stable across platforms
// and standard-library versions; splitmix64 is a fixed published algorithm.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64();

  // Uniform in [0, 1) with 53-bit resolution.
  double next_double();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller; draws two uniforms per pair, caches the
  // second value.
  double normal();

  // Uniform integer in [0, n) by rejection sampling (unbiased).
  uint64_t below(uint64_t n);

  // Fisher-Yates permutation of {0, ..., n-1}.
  std::vector<size_t> permutation(size_t n);

 private:
  uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// Deterministic seed derivation: folds a role tag and indices into a master
// seed so every sample/run gets an independent, reproducible stream.
uint64_t derive_seed(uint64_t master, std::string_view tag);
uint64_t derive_seed(uint64_t master, std::string_view tag, uint64_t a);
uint64_t derive_seed(uint64_t master, std::string_view tag, uint64_t a, uint64_t b);

}  // namespace urec
