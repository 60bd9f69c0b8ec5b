#pragma once

#include <cmath>

namespace chemolab::detail {

struct Extremum {
  double x;
  double value;
};

// Maximises a unimodal `f` on [lo, hi]. Stops once the bracket is narrower
// than rel_tol * |x| + abs_tol.
template <class F>
Extremum golden_section_maximize(F&& f, double lo, double hi, double rel_tol,
                                 double abs_tol, int max_iters = 300) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < max_iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::abs(mid) + abs_tol) break;
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 >= f2 ? Extremum{x1, f1} : Extremum{x2, f2};
}

}  // namespace chemolab::detail
