#include <doctest.h>

#include <chemolab/error.hpp>
#include <chemolab/operators.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "property.hpp"

using namespace chemolab;
using chemolab::ops::laplacian;

namespace {

constexpr double kPi = std::numbers::pi;

double laplacian_error(int n, double lx) {
  const Grid g(n, n, lx, 1.0);
  const double k = kPi / lx;
  const auto f = ScalarField::from_function(
      g, [&](double x, double y) { return std::cos(k * x) * std::cos(2 * kPi * y); });
  const auto lap = laplacian(f);
  const double lambda = -(k * k + 4 * kPi * kPi);
  double err = 0.0;
  for (std::size_t c = 0; c < f.size(); ++c)
    err = std::max(err, std::abs(lap[c] - lambda * f[c]));
  return err;
}

}  // namespace

TEST_CASE("laplacian of a constant vanishes and integrates to zero") {
  const Grid g(12, 7, 1.3, 0.6);
  const auto lap = laplacian(ScalarField(g, 3.7));
  CHECK(norm(lap, Norm::Linf) == 0.0);

  proptest::Rng rng(0x0e01);
  for (int trial = 0; trial < 100; ++trial) {
    const Grid gr = proptest::random_grid(rng);
    const auto f = proptest::random_field(gr, rng, -5.0, 5.0);
    const auto l = laplacian(f);
    double scale = 0.0;
    for (double x : l.values()) scale += std::abs(x);
    CHECK(std::abs(integrate(l)) <= 1e-12 * scale * gr.cell_area() + 1e-300);
  }
}

TEST_CASE("laplacian is second order on Neumann eigenfunctions") {
  for (double lx : {1.0, 2.5}) {
    const double e1 = laplacian_error(32, lx);
    const double e2 = laplacian_error(64, lx);
    const double e3 = laplacian_error(128, lx);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.3 / 4.0));
    CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.3 / 4.0));
  }
}

TEST_CASE("chemotactic divergence matches a dense assembly") {
  const Grid g = Grid::unit_square(32);
  const auto v = ScalarField::from_function(g, [](double x, double y) {
    return std::exp(-((x - 0.4) * (x - 0.4) + (y - 0.6) * (y - 0.6)) / 0.02);
  });
  proptest::Rng rng(0x0e02);
  for (bool upwind : {true, false}) {
    for (int variant = 0; variant < 2; ++variant) {
      const ScalarField u =
          variant == 0 ? ScalarField(g, 1.0) : proptest::random_field(g, rng, 0.0, 2.0);
      const double chi = 1.7;
      const auto fast = ops::chemotactic_divergence(
          u, v, chi, upwind ? ops::FluxScheme::upwind : ops::FluxScheme::central);
      const auto A = oracle::dense_chemotaxis_matrix(g, v, chi, upwind);
      const std::size_t n = g.size();
      double scale = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < n; ++c) acc += A[r * n + c] * u[c];
        CHECK(std::abs(fast[r] - acc) <= 1e-13 * std::max(1.0, std::abs(acc)));
        scale = std::max(scale, std::abs(acc));
      }
      CHECK(scale > 1.0);
    }
  }
}

TEST_CASE("chemotactic divergence basics") {
  const Grid g(10, 14, 1.0, 2.0);
  proptest::Rng rng(0x0e03);
  const auto u = proptest::random_field(g, rng, 0.0, 3.0);
  CHECK(norm(ops::chemotactic_divergence(u, ScalarField(g, 2.0), 1.0), Norm::Linf) == 0.0);
  ScalarField neg = u;
  neg(3, 3) = -0.1;
  CHECK_THROWS_AS(ops::chemotactic_divergence(neg, u, 1.0), PositivityError);
}

TEST_CASE("property: conservation and the upwind sign rule") {
  proptest::Rng rng(0x0e04);
  for (int trial = 0; trial < 200; ++trial) {
    const Grid g = proptest::random_grid(rng);
    auto u = proptest::random_field(g, rng, 0.0, 4.0);
    for (double& x : u.values())
      if (rng.uniform() < 0.2) x = 0.0;
    const auto v = proptest::random_field(g, rng, -3.0, 3.0);
    const double chi = rng.log_uniform(0.01, 10.0);
    const auto out = ops::chemotactic_divergence(u, v, chi);
    double scale = 0.0;
    for (double x : out.values()) scale += std::abs(x);
    CHECK(std::abs(integrate(out)) <= 1e-12 * scale * g.cell_area() + 1e-300);
    for (std::size_t k = 0; k < u.size(); ++k)
      if (u[k] == 0.0) CHECK(out[k] >= 0.0);

    // A forward step no longer than the outflow bound keeps u >= 0.
    const double dt = 1.0 / ops::max_outflow_rate(v, chi);
    for (std::size_t k = 0; k < u.size(); ++k)
      CHECK(u[k] + dt * out[k] >= -1e-12 * (1.0 + u[k]));
  }
}

TEST_CASE("gradient_squared") {
  const Grid g = Grid::unit_square(16);
  CHECK(norm(ops::gradient_squared(ScalarField(g, 1.0)), Norm::Linf) == 0.0);
  const auto lin = ScalarField::from_function(g, [](double x, double) { return x; });
  const auto gs = ops::gradient_squared(lin);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 1; i < g.nx() - 1; ++i) CHECK(gs(i, j) == doctest::Approx(1.0).epsilon(1e-12));

  proptest::Rng rng(0x0e05);
  const auto r = ops::gradient_squared(proptest::random_field(g, rng, -1.0, 1.0));
  CHECK(r.min() >= 0.0);
}

TEST_CASE("property: dirichlet energy equals -integral(w lap w)") {
  proptest::Rng rng(0x0e06);
  for (int trial = 0; trial < 100; ++trial) {
    const Grid g = proptest::random_grid(rng);
    const auto w = proptest::random_field(g, rng, -2.0, 2.0);
    const auto lap = laplacian(w);
    double wl = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) wl += w[k] * lap[k];
    const double energy = ops::dirichlet_energy(w);
    CHECK(energy >= 0.0);
    CHECK(-wl * g.cell_area() == doctest::Approx(energy).epsilon(1e-11));
  }
}
