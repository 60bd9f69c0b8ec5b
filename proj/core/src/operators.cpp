#include "chemolab/operators.hpp"

#include <algorithm>
#include <cmath>

#include "chemolab/error.hpp"
#include "chemolab/format.hpp"

namespace chemolab::ops {

StencilWorkspace::StencilWorkspace(const Grid& grid)
    : grid_(grid),
      stride_(static_cast<std::size_t>(grid.nx()) + 2),
      fx_(static_cast<std::size_t>(grid.nx() + 1) * grid.ny()),
      fy_(static_cast<std::size_t>(grid.ny() + 1) * grid.nx()) {
  const std::size_t padded = stride_ * (static_cast<std::size_t>(grid.ny()) + 2);
  pad_[0].assign(padded, 0.0);
  pad_[1].assign(padded, 0.0);
}

void StencilWorkspace::load(int slot, const ScalarField& field) {
  if (!(field.grid() == grid_))
    throw DomainError("StencilWorkspace: grid mismatch");
  const int nx = grid_.nx();
  const int ny = grid_.ny();
  auto& p = pad_[slot];
  auto at = [&](int i, int j) -> double& {
    return p[static_cast<std::size_t>(j + 1) * stride_ +
             static_cast<std::size_t>(i + 1)];
  };
  for (int j = 0; j < ny; ++j) {
    const double* row = &field.values()[field.grid().index(0, j)];
    std::copy(row, row + nx, &at(0, j));
    at(-1, j) = row[0];
    at(nx, j) = row[nx - 1];
  }
  for (int i = -1; i <= nx; ++i) {
    at(i, -1) = at(i, 0);
    at(i, ny) = at(i, ny - 1);
  }
}

void laplacian(const ScalarField& field, StencilWorkspace& ws,
               ScalarField& out) {
  require_finite(field, "laplacian");
  const Grid& g = field.grid();
  ws.load(0, field);
  const double ix2 = 1.0 / (g.hx() * g.hx());
  const double iy2 = 1.0 / (g.hy() * g.hy());
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double c = ws.padded(0, i, j);
      out(i, j) = (ws.padded(0, i + 1, j) - 2.0 * c + ws.padded(0, i - 1, j)) * ix2 +
                  (ws.padded(0, i, j + 1) - 2.0 * c + ws.padded(0, i, j - 1)) * iy2;
    }
  }
}

ScalarField laplacian(const ScalarField& field) {
  StencilWorkspace ws(field.grid());
  ScalarField out(field.grid());
  laplacian(field, ws, out);
  return out;
}

void chemotactic_divergence(const ScalarField& u, const ScalarField& v,
                            double chi, FluxScheme scheme, StencilWorkspace& ws,
                            ScalarField& out) {
  require_finite(u, "chemotactic_divergence(u)");
  require_finite(v, "chemotactic_divergence(v)");
  if (!(u.grid() == v.grid())) throw DomainError("chemotactic_divergence: grid mismatch");
  for (double x : u.values())
    if (x < 0.0)
      throw PositivityError("chemotactic_divergence: negative u = " +
                            format_real(x));
  const Grid& g = u.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  ws.load(0, u);
  ws.load(1, v);

  auto face_u = [&](double left, double right, double grad) {
    if (scheme == FluxScheme::central) return 0.5 * (left + right);
    return grad > 0.0 ? left : right;
  };

  const double ihx = 1.0 / g.hx();
  const double ihy = 1.0 / g.hy();
  for (int j = 0; j < ny; ++j) {
    ws.flux_x(0, j) = 0.0;
    ws.flux_x(nx, j) = 0.0;
    for (int i = 1; i < nx; ++i) {
      const double grad = (ws.padded(1, i, j) - ws.padded(1, i - 1, j)) * ihx;
      ws.flux_x(i, j) =
          chi * face_u(ws.padded(0, i - 1, j), ws.padded(0, i, j), grad) * grad;
    }
  }
  for (int i = 0; i < nx; ++i) {
    ws.flux_y(i, 0) = 0.0;
    ws.flux_y(i, ny) = 0.0;
  }
  for (int j = 1; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double grad = (ws.padded(1, i, j) - ws.padded(1, i, j - 1)) * ihy;
      ws.flux_y(i, j) =
          chi * face_u(ws.padded(0, i, j - 1), ws.padded(0, i, j), grad) * grad;
    }
  }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      out(i, j) = -(ws.flux_x(i + 1, j) - ws.flux_x(i, j)) * ihx -
                  (ws.flux_y(i, j + 1) - ws.flux_y(i, j)) * ihy;
}

ScalarField chemotactic_divergence(const ScalarField& u, const ScalarField& v,
                                   double chi, FluxScheme scheme) {
  StencilWorkspace ws(u.grid());
  ScalarField out(u.grid());
  chemotactic_divergence(u, v, chi, scheme, ws, out);
  return out;
}

ScalarField gradient_squared(const ScalarField& v) {
  require_finite(v, "gradient_squared");
  const Grid& g = v.grid();
  StencilWorkspace ws(g);
  ws.load(0, v);
  ScalarField out(g);
  const double cx = 0.5 / g.hx();
  const double cy = 0.5 / g.hy();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double dx = (ws.padded(0, i + 1, j) - ws.padded(0, i - 1, j)) * cx;
      const double dy = (ws.padded(0, i, j + 1) - ws.padded(0, i, j - 1)) * cy;
      out(i, j) = dx * dx + dy * dy;
    }
  }
  return out;
}

double dirichlet_energy(const ScalarField& w) {
  require_finite(w, "dirichlet_energy");
  const Grid& g = w.grid();
  double sx = 0.0;
  double sy = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 1; i < g.nx(); ++i) {
      const double d = w(i, j) - w(i - 1, j);
      sx += d * d;
    }
  for (int j = 1; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double d = w(i, j) - w(i, j - 1);
      sy += d * d;
    }
  // (d/h)^2 * hx*hy per face
  return sx * g.hy() / g.hx() + sy * g.hx() / g.hy();
}

double max_outflow_rate(const ScalarField& v, double chi) {
  require_finite(v, "max_outflow_rate");
  const Grid& g = v.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  const double ihx = 1.0 / g.hx();
  const double ihy = 1.0 / g.hy();
  double worst = 0.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double c = v(i, j);
      // Flux chi*u*grad leaves the cell towards any neighbour with larger v.
      double rate = 0.0;
      if (i > 0) rate += std::max(v(i - 1, j) - c, 0.0) * ihx * ihx;
      if (i < nx - 1) rate += std::max(v(i + 1, j) - c, 0.0) * ihx * ihx;
      if (j > 0) rate += std::max(v(i, j - 1) - c, 0.0) * ihy * ihy;
      if (j < ny - 1) rate += std::max(v(i, j + 1) - c, 0.0) * ihy * ihy;
      worst = std::max(worst, rate);
    }
  }
  return chi * worst;
}

}  // namespace chemolab::ops
