#pragma once

#include <vector>

#include "chemolab/grid.hpp"

namespace chemolab::sim {

/// Backward-Euler diffusion step (I - dt Lap_h) u_new = u_old, solved exactly.
///
/// The mirror-ghost Neumann Laplacian on a cell-centred grid is diagonal in
/// the DCT-II basis, so the solve is two real-to-real transforms and a
/// pointwise division. The mean (k = l = 0 mode) is untouched, so the step
/// conserves integrate(u) to roundoff, and (I - dt Lap_h)^-1 has nonnegative
/// entries, so u_old >= 0 gives u_new >= 0 up to roundoff, which is clamped.
class ImplicitDiffusion {
 public:
  explicit ImplicitDiffusion(const Grid& grid);
  ~ImplicitDiffusion();
  ImplicitDiffusion(const ImplicitDiffusion&) = delete;
  ImplicitDiffusion& operator=(const ImplicitDiffusion&) = delete;

  /// In-place step of length dt >= 0.
  void apply(ScalarField& u, double dt);

 private:
  Grid grid_;
  std::vector<double> buffer_;
  std::vector<double> eig_x_;
  std::vector<double> eig_y_;
  void* forward_ = nullptr;
  void* inverse_ = nullptr;
};

}  // namespace chemolab::sim
