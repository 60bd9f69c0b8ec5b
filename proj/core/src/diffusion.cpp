#include "chemolab/diffusion.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "chemolab/error.hpp"

namespace chemolab::sim {

namespace {

// FFTW's planner is not thread-safe; sweeps build integrators concurrently.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<double> laplacian_eigenvalues(int n, double h) {
  // -Lap_h eigenvalue of the k-th DCT-II mode
  std::vector<double> eig(n);
  for (int k = 0; k < n; ++k) {
    const double s = std::sin(std::numbers::pi * k / (2.0 * n));
    eig[k] = 4.0 * s * s / (h * h);
  }
  return eig;
}

}  // namespace

ImplicitDiffusion::ImplicitDiffusion(const Grid& grid)
    : grid_(grid),
      buffer_(grid.size()),
      eig_x_(laplacian_eigenvalues(grid.nx(), grid.hx())),
      eig_y_(laplacian_eigenvalues(grid.ny(), grid.hy())) {
  std::lock_guard lock(planner_mutex());
  forward_ = fftw_plan_r2r_2d(grid.ny(), grid.nx(), buffer_.data(),
                              buffer_.data(), FFTW_REDFT10, FFTW_REDFT10,
                              FFTW_ESTIMATE);
  inverse_ = fftw_plan_r2r_2d(grid.ny(), grid.nx(), buffer_.data(),
                              buffer_.data(), FFTW_REDFT01, FFTW_REDFT01,
                              FFTW_ESTIMATE);
  if (!forward_ || !inverse_) throw Error("ImplicitDiffusion: FFTW planning failed");
}

ImplicitDiffusion::~ImplicitDiffusion() {
  std::lock_guard lock(planner_mutex());
  if (forward_) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  if (inverse_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_));
}

void ImplicitDiffusion::apply(ScalarField& u, double dt) {
  if (!(u.grid() == grid_)) throw DomainError("ImplicitDiffusion: grid mismatch");
  if (!(dt >= 0.0)) throw DomainError("ImplicitDiffusion: dt must be >= 0");
  if (dt == 0.0) return;
  const bool nonnegative = u.min() >= 0.0;

  auto values = u.values();
  std::copy(values.begin(), values.end(), buffer_.begin());
  fftw_execute(static_cast<fftw_plan>(forward_));
  const int nx = grid_.nx();
  const int ny = grid_.ny();
  // REDFT01(REDFT10(x)) = (2 nx)(2 ny) x
  const double norm = 1.0 / (4.0 * nx * ny);
  for (int l = 0; l < ny; ++l)
    for (int k = 0; k < nx; ++k)
      buffer_[static_cast<std::size_t>(l) * nx + k] *=
          norm / (1.0 + dt * (eig_x_[k] + eig_y_[l]));
  fftw_execute(static_cast<fftw_plan>(inverse_));

  for (std::size_t k = 0; k < values.size(); ++k) {
    const double x = buffer_[k];
    values[k] = (nonnegative && x < 0.0) ? 0.0 : x;
  }
}

}  // namespace chemolab::sim
