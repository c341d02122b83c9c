#pragma once

#include <cstdint>
#include <random>

namespace cfrecs {

// Deterministic random source. All distributions are hand-rolled on top of
// mt19937_64 so that a seed produces identical streams on every platform,
// which the reproducibility guarantees of the pipeline depend on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  double uniform();                        // [0, 1)
  double uniform(double lo, double hi);    // [lo, hi)
  int uniform_int(int n);                  // unbiased draw from [0, n)
  bool bernoulli(double p);
  double normal();                         // standard normal, Box-Muller
  double normal(double mean, double stddev);
  double gamma(double shape);              // shape > 0, unit scale

  // Independent stream derived from this generator's seed and a stream id.
  // Streams are stable regardless of how much the parent has been consumed.
  Rng split(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// SplitMix64 finalizer, used for seed derivation and stable hashing of ids.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace cfrecs
