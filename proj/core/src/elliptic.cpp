#include "chemolab/elliptic.hpp"

#include <cmath>

#include "chemolab/error.hpp"
#include "chemolab/format.hpp"

namespace chemolab::elliptic {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double euclid(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

}  // namespace

HelmholtzSolver::HelmholtzSolver(const Grid& grid)
    : grid_(grid),
      r_(grid.size()),
      z_(grid.size()),
      p_(grid.size()),
      ap_(grid.size()),
      inv_diag_(grid.size()) {}

namespace {

// out = (shift I - Lap_h) v; returns dot(v, out). Edge cells drop the
// missing neighbours (mirror ghosts), interior rows run branch-free.
template <class In, class Out>
double apply_operator(const Grid& g, double shift, const In& v, Out& out) {
  const int nx = g.nx();
  const int ny = g.ny();
  const double ix2 = 1.0 / (g.hx() * g.hx());
  const double iy2 = 1.0 / (g.hy() * g.hy());
  const double center = shift + 2.0 * ix2 + 2.0 * iy2;
  double vav = 0.0;
  for (int j = 0; j < ny; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    const double* c = &v[row];
    double* o = &out[row];
    const double* s = j > 0 ? c - nx : c;
    const double* n = j < ny - 1 ? c + nx : c;
    // A missing y-neighbour is replaced by the cell itself, cancelling its
    // diagonal contribution.
    o[0] = (center - ix2) * c[0] - ix2 * c[1] - iy2 * (s[0] + n[0]);
    for (int i = 1; i < nx - 1; ++i)
      o[i] = center * c[i] - ix2 * (c[i - 1] + c[i + 1]) - iy2 * (s[i] + n[i]);
    o[nx - 1] = (center - ix2) * c[nx - 1] - ix2 * c[nx - 2] -
                iy2 * (s[nx - 1] + n[nx - 1]);
    for (int i = 0; i < nx; ++i) vav += c[i] * o[i];
  }
  return vav;
}

double diagonal(const Grid& g, double shift, int i, int j) {
  const double ix2 = 1.0 / (g.hx() * g.hx());
  const double iy2 = 1.0 / (g.hy() * g.hy());
  double d = shift;
  if (i > 0) d += ix2;
  if (i < g.nx() - 1) d += ix2;
  if (j > 0) d += iy2;
  if (j < g.ny() - 1) d += iy2;
  return d;
}

}  // namespace

void HelmholtzSolver::apply(const ScalarField& v, double shift,
                            ScalarField& out) const {
  apply_operator(grid_, shift, v.values(), out);
}

SolveStats HelmholtzSolver::solve(const ScalarField& rhs, double shift,
                                  ScalarField& v,
                                  const EllipticOptions& options) {
  if (!(shift > 0.0)) throw DomainError("HelmholtzSolver: shift must be > 0");
  if (!(options.tol > 0.0)) throw DomainError("HelmholtzSolver: tol must be > 0");
  if (!(rhs.grid() == grid_) || !(v.grid() == grid_))
    throw DomainError("HelmholtzSolver: grid mismatch");
  require_finite(rhs, "solve_helmholtz(rhs)");
  require_finite(v, "solve_helmholtz(initial guess)");

  const int max_iters =
      options.max_iters > 0 ? options.max_iters : 10 * (grid_.nx() + grid_.ny());
  const double rhs_norm = euclid(rhs.values());
  if (rhs_norm == 0.0) {
    for (double& x : v.values()) x = 0.0;
    return {};
  }

  const int nx = grid_.nx();
  auto x = v.values();
  auto b = rhs.values();
  apply_operator(grid_, shift, x, ap_);
  for (std::size_t k = 0; k < r_.size(); ++k) r_[k] = b[k] - ap_[k];

  double res = std::sqrt(dot(r_, r_)) / rhs_norm;
  if (res <= options.tol) return {0, res};

  if (shift != diag_shift_) {
    for (int j = 0; j < grid_.ny(); ++j)
      for (int i = 0; i < nx; ++i)
        inv_diag_[static_cast<std::size_t>(j) * nx + i] =
            1.0 / diagonal(grid_, shift, i, j);
    diag_shift_ = shift;
  }
  for (std::size_t k = 0; k < r_.size(); ++k) z_[k] = r_[k] * inv_diag_[k];
  p_ = z_;
  double rz = dot(r_, z_);

  const std::size_t size = r_.size();
  const double tol2 = options.tol * options.tol * rhs_norm * rhs_norm;
  for (int it = 1; it <= max_iters; ++it) {
    const double alpha = rz / apply_operator(grid_, shift, p_, ap_);
    double rr = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
      x[k] += alpha * p_[k];
      r_[k] -= alpha * ap_[k];
      rr += r_[k] * r_[k];
    }
    if (!std::isfinite(rr))
      throw SolverFailure("HelmholtzSolver: non-finite residual", rr);
    if (rr <= tol2) return {it, std::sqrt(rr) / rhs_norm};
    res = std::sqrt(rr) / rhs_norm;
    double rz_new = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
      z_[k] = r_[k] * inv_diag_[k];
      rz_new += r_[k] * z_[k];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < size; ++k) p_[k] = z_[k] + beta * p_[k];
  }
  throw SolverFailure("HelmholtzSolver: no convergence in " +
                          std::to_string(max_iters) +
                          " iterations, relative residual " + format_real(res),
                      res);
}

double maximum_principle_floor(const ScalarField& rhs,
                               const EllipticOptions& options) {
  return -10.0 * options.tol * euclid(rhs.values());
}

ScalarField solve_helmholtz(const ScalarField& u,
                            const EllipticOptions& options) {
  HelmholtzSolver solver(u.grid());
  ScalarField v(u.grid());
  solver.solve(u, 1.0, v, options);
  if (u.min() >= 0.0) {
    const double floor = maximum_principle_floor(u, options);
    if (v.min() < floor)
      throw SolverFailure("solve_helmholtz: maximum principle violated, min v = " +
                              format_real(v.min()),
                          v.min());
  }
  return v;
}

}  // namespace chemolab::elliptic
