#pragma once

#include <vector>

#include "chemolab/grid.hpp"

namespace chemolab::elliptic {

struct EllipticOptions {
  double tol = 1e-10;  ///< relative residual ||A v - rhs||_2 / ||rhs||_2
  int max_iters = 0;   ///< 0 selects 10 * (nx + ny)
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients for (shift * I - Lap_h) v = rhs,
/// with Lap_h the mirror-ghost Neumann Laplacian. The operator is applied
/// matrix-free and is SPD for every shift > 0.
///
/// Holds its Krylov vectors; one instance per concurrent caller.
class HelmholtzSolver {
 public:
  explicit HelmholtzSolver(const Grid& grid);

  /// `v` is the initial guess on entry and the solution on exit.
  /// Throws SolverFailure (carrying the final relative residual) if the
  /// tolerance is not met within max_iters.
  SolveStats solve(const ScalarField& rhs, double shift, ScalarField& v,
                   const EllipticOptions& options = {});

  /// out = (shift * I - Lap_h) v
  void apply(const ScalarField& v, double shift, ScalarField& out) const;

 private:
  Grid grid_;
  std::vector<double> r_, z_, p_, ap_, inv_diag_;
  double diag_shift_ = 0.0;
};

/// Solves the quasi-static signal equation 0 = Lap v - v + u, i.e.
/// (I - Lap_h) v = u, from a zero initial guess. For u >= 0 the result is
/// checked against the discrete maximum principle,
/// min v >= -10 * tol * ||u||_2, and SolverFailure is thrown otherwise.
ScalarField solve_helmholtz(const ScalarField& u,
                            const EllipticOptions& options = {});

/// Minimum admissible value of v for the maximum-principle check.
double maximum_principle_floor(const ScalarField& rhs,
                               const EllipticOptions& options);

}  // namespace chemolab::elliptic
