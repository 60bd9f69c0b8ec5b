#pragma once

// Seeded generators for property tests. Every draw comes from SplitMix64 so a
// failing case can be replayed from its printed seed.

#include <chemolab/grid.hpp>
#include <chemolab/integrator.hpp>

#include <cmath>
#include <cstdint>

namespace proptest {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t bits() { return chemolab::sim::splitmix64(state_); }
  double uniform() { return chemolab::sim::unit_uniform(bits()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// exp(uniform(ln lo, ln hi)), lo > 0.
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(bits() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

inline chemolab::ScalarField random_field(const chemolab::Grid& grid, Rng& rng,
                                          double lo, double hi) {
  chemolab::ScalarField f(grid);
  for (double& x : f.values()) x = rng.uniform(lo, hi);
  return f;
}

inline chemolab::Grid random_grid(Rng& rng, int n_lo = 4, int n_hi = 24) {
  return chemolab::Grid(rng.integer(n_lo, n_hi), rng.integer(n_lo, n_hi),
                        rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0));
}

}  // namespace proptest
