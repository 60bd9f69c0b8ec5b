#pragma once

#include <cstdint>
#include <string>

#include "chemolab/grid.hpp"

namespace chemolab::gn {

/// Gagliardo-Nirenberg instance ||w||_p <= C (||grad w||_2^d ||w||_q^(1-d) + ||w||_s)
/// with p = 4, q = s = 2 in two dimensions, so d = 1/2.
struct GNInstance {
  Grid grid;
  static constexpr int p = 4;
  static constexpr int q = 2;
  static constexpr int s = 2;
  static constexpr int n = 2;

  static constexpr double delta() noexcept {
    return (1.0 / q - 1.0 / p) / (1.0 / q - 1.0 / 2.0 + 1.0 / n);
  }
};

/// ||w||_4 / (||grad_h w||_2^(1/2) ||w||_2^(1/2) + ||w||_2), with the face-based
/// gradient of ops::dirichlet_energy. Throws DomainError for w == 0.
double gn_ratio(const ScalarField& w);

/// exp(-|x - c|^2 / (2 width^2)), or the constant 1 field when `constant`.
struct BumpTrial {
  double center_x = 0.0;
  double center_y = 0.0;
  double width = 0.0;
  bool constant = false;

  ScalarField field(const Grid& grid) const;
  std::string describe() const;
};

struct CgnEstimate {
  double lower_bound = 0.0;  ///< best gn_ratio seen
  BumpTrial best;
  int evaluations = 0;
};

struct EstimateOptions {
  int budget = 10000;
  std::uint64_t seed = 1;
  /// Threads for the random trials; the result does not depend on it.
  int threads = 1;
};

/// Maximises gn_ratio over a fixed trial sequence: trial 0 is the constant
/// field; the sequence is then organised in blocks of 64 where the first 48
/// are random bumps (trial k draws from its own seeded sub-stream) and the
/// last 16 are coordinate-ascent moves around the running best in
/// (center_x, center_y, log width). Trial k depends only on trials < k, so the
/// estimate is nondecreasing in the budget. Throws DomainError if budget < 100.
CgnEstimate estimate_cgn(const GNInstance& instance, const EstimateOptions& options);

}  // namespace chemolab::gn
