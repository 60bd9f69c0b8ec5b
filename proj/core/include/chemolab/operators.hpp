#pragma once

#include <vector>

#include "chemolab/grid.hpp"

namespace chemolab::ops {

/// How u is evaluated on a cell face in the chemotactic flux.
/// `upwind` takes the donor cell (positivity preserving under the CFL bound);
/// `central` averages the two neighbours (second order, no positivity
/// guarantee).
enum class FluxScheme { upwind, central };

/// Ghost-padded copies of stencil operands plus face flux buffers.
///
/// Ghost cells mirror the adjacent interior value, which makes the normal
/// difference across every boundary face vanish (homogeneous Neumann).
/// A workspace belongs to one caller at a time.
class StencilWorkspace {
 public:
  explicit StencilWorkspace(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }

  /// Copies `field` into the padded buffer `slot` (0 or 1) and fills ghosts.
  void load(int slot, const ScalarField& field);
  /// Padded value at interior-relative indices, -1 <= i <= nx, -1 <= j <= ny.
  double padded(int slot, int i, int j) const noexcept {
    return pad_[slot][static_cast<std::size_t>(j + 1) * stride_ +
                      static_cast<std::size_t>(i + 1)];
  }

  /// Flux through the face between cells (i-1, j) and (i, j), 0 <= i <= nx.
  double& flux_x(int i, int j) noexcept {
    return fx_[static_cast<std::size_t>(j) * (grid_.nx() + 1) + i];
  }
  /// Flux through the face between cells (i, j-1) and (i, j), 0 <= j <= ny.
  double& flux_y(int i, int j) noexcept {
    return fy_[static_cast<std::size_t>(j) * grid_.nx() + i];
  }

 private:
  Grid grid_;
  std::size_t stride_;
  std::vector<double> pad_[2];
  std::vector<double> fx_;
  std::vector<double> fy_;
};

/// 5-point Neumann Laplacian. Integrates to zero over the domain.
ScalarField laplacian(const ScalarField& field);
void laplacian(const ScalarField& field, StencilWorkspace& ws, ScalarField& out);

/// -chi div(u grad v) in conservative face-flux form, i.e. the chemotaxis term
/// exactly as it enters the right-hand side of the u-equation. The face flux is
/// chi * u_face * (v_R - v_L) / h, with u_face chosen by `scheme`. Throws
/// PositivityError if u has a negative entry.
ScalarField chemotactic_divergence(const ScalarField& u, const ScalarField& v,
                                   double chi,
                                   FluxScheme scheme = FluxScheme::upwind);
void chemotactic_divergence(const ScalarField& u, const ScalarField& v,
                            double chi, FluxScheme scheme, StencilWorkspace& ws,
                            ScalarField& out);

/// |grad v|^2 per cell from central differences over mirrored ghosts.
ScalarField gradient_squared(const ScalarField& v);

/// Sum over interior faces of (dw/dn)^2 times the cell area, the discrete
/// Dirichlet energy with -integral(w * laplacian(w)) == dirichlet_energy(w).
double dirichlet_energy(const ScalarField& w);

/// Largest per-cell chemotactic outflow rate
/// chi * sum_faces max(outward dv/dn, 0) / h. An explicit upwind transport step
/// of length dt keeps u >= 0 whenever dt * max_outflow_rate <= 1.
double max_outflow_rate(const ScalarField& v, double chi);

}  // namespace chemolab::ops
