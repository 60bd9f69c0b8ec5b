#pragma once

// Reference implementations that share no code with the library.

#include <chemolab/grid.hpp>
#include <chemolab/kinetics.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

using chemolab::Grid;
using chemolab::ScalarField;
using chemolab::kinetics::SourceSpec;

// Brute-force sup of f(s) + eta s over a geometric grid, including s -> 0+.
inline double brute_M_eta(const SourceSpec& f, double eta, double s_lo, double s_hi, int n) {
  double best = f(0.0);
  const double ratio = std::pow(s_hi / s_lo, 1.0 / (n - 1));
  double s = s_lo;
  for (int k = 0; k < n; ++k, s *= ratio) best = std::max(best, f(s) + eta * s);
  return best;
}

// Dense matrix of u -> -chi div(u grad v) for a fixed v, assembled cell by cell
// from the upwind face rule without the production stencil code.
inline std::vector<double> dense_chemotaxis_matrix(const Grid& g, const ScalarField& v,
                                                   double chi, bool upwind) {
  const std::size_t n = g.size();
  std::vector<double> A(n * n, 0.0);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const std::size_t c = g.index(i, j);
      const int di[4] = {-1, 1, 0, 0};
      const int dj[4] = {0, 0, -1, 1};
      for (int f = 0; f < 4; ++f) {
        const int ni = i + di[f];
        const int nj = j + dj[f];
        if (ni < 0 || nj < 0 || ni >= g.nx() || nj >= g.ny()) continue;
        const double h = di[f] != 0 ? g.hx() : g.hy();
        const std::size_t nb = g.index(ni, nj);
        const double rate = chi * (v[nb] - v[c]) / (h * h);  // outflow rate per unit u_face
        if (upwind) {
          if (rate > 0)
            A[c * n + c] -= rate;
          else
            A[c * n + nb] -= rate;
        } else {
          A[c * n + c] -= 0.5 * rate;
          A[c * n + nb] -= 0.5 * rate;
        }
      }
    }
  }
  return A;
}

}  // namespace oracle
