#include <doctest.h>

#include <chemolab/diffusion.hpp>
#include <chemolab/elliptic.hpp>
#include <chemolab/error.hpp>
#include <chemolab/operators.hpp>

#include <cmath>
#include <numbers>

#include "property.hpp"

using namespace chemolab;
using namespace chemolab::elliptic;

namespace {

double euclid(const ScalarField& f) {
  double s = 0.0;
  for (double x : f.values()) s += x * x;
  return std::sqrt(s);
}

double eigen_error(int n, double lx) {
  const Grid g(n, n / 2, lx, 0.5 * lx);
  const double k = std::numbers::pi / lx;
  const auto u = ScalarField::from_function(
      g, [&](double x, double) { return 1.0 + std::cos(k * x); });
  const auto v = solve_helmholtz(u);
  double err = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double exact = 1.0 + std::cos(k * g.x_center(i)) / (1.0 + k * k);
      err = std::max(err, std::abs(v(i, j) - exact));
    }
  return err;
}

}  // namespace

TEST_CASE("constant right-hand side gives the same constant") {
  const Grid g(16, 9, 1.0, 0.7);
  const auto v = solve_helmholtz(ScalarField(g, 2.5));
  for (double x : v.values()) CHECK(x == doctest::Approx(2.5).epsilon(1e-10));
}

TEST_CASE("Neumann eigenfunction converges at second order") {
  for (double lx : {1.0, 3.0}) {
    const double e1 = eigen_error(32, lx);
    const double e2 = eigen_error(64, lx);
    CHECK(e1 < 1e-2);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("property: residual contract, mean preservation and nonnegativity") {
  proptest::Rng rng(0xe111);
  for (int trial = 0; trial < 100; ++trial) {
    const Grid g = proptest::random_grid(rng, 4, 40);
    const bool positive = trial % 2 == 0;
    const auto u = proptest::random_field(g, rng, positive ? 0.0 : -1.0, 1.0);
    EllipticOptions opts;
    opts.tol = trial % 3 == 0 ? 1e-8 : 1e-10;
    const auto v = solve_helmholtz(u, opts);

    HelmholtzSolver solver(g);
    ScalarField Av(g);
    solver.apply(v, 1.0, Av);
    CHECK(euclid(Av - u) <= opts.tol * euclid(u) * (1.0 + 1e-12));
    CHECK(std::abs(integrate(v) - integrate(u)) <=
          opts.tol * g.area() * euclid(u) + 1e-14);
    if (positive) CHECK(v.min() >= -10.0 * opts.tol * euclid(u));
  }
}

TEST_CASE("solver failure carries the residual") {
  const Grid g = Grid::unit_square(32);
  proptest::Rng rng(0xe112);
  const auto u = proptest::random_field(g, rng, 0.0, 1.0);
  EllipticOptions opts;
  opts.max_iters = 2;
  try {
    solve_helmholtz(u, opts);
    FAIL("expected SolverFailure");
  } catch (const SolverFailure& e) {
    CHECK(e.residual() > opts.tol);
  }
  ScalarField bad = u;
  bad[5] = std::nan("");
  CHECK_THROWS_AS(solve_helmholtz(bad), DivergedFieldError);
}

TEST_CASE("warm start needs fewer iterations") {
  const Grid g = Grid::unit_square(48);
  proptest::Rng rng(0xe113);
  const auto u = proptest::random_field(g, rng, 0.5, 1.5);
  HelmholtzSolver solver(g);
  ScalarField v(g);
  const int cold = solver.solve(u, 1.0, v).iterations;
  ScalarField u2 = u;
  u2 *= 1.0 + 1e-6;
  const int warm = solver.solve(u2, 1.0, v).iterations;
  CHECK(warm < cold);
}

TEST_CASE("implicit diffusion equals the PCG solve of (I - dt Lap) u = u_old") {
  proptest::Rng rng(0xe114);
  for (int trial = 0; trial < 20; ++trial) {
    const Grid g = proptest::random_grid(rng, 4, 32);
    const auto u_old = proptest::random_field(g, rng, 0.0, 2.0);
    const double dt = rng.log_uniform(1e-5, 1.0);
    ScalarField u = u_old;
    sim::ImplicitDiffusion diffusion(g);
    diffusion.apply(u, dt);

    // (1/dt I - Lap) u = u_old / dt
    ScalarField rhs = u_old;
    rhs *= 1.0 / dt;
    ScalarField oracle(g);
    HelmholtzSolver solver(g);
    EllipticOptions opts;
    opts.tol = 1e-13;
    opts.max_iters = 100000;
    solver.solve(rhs, 1.0 / dt, oracle, opts);
    for (std::size_t k = 0; k < u.size(); ++k)
      CHECK(u[k] == doctest::Approx(oracle[k]).epsilon(1e-10).scale(1.0));
    CHECK(std::abs(integrate(u) - integrate(u_old)) <= 1e-13 * integrate(u_old));
    CHECK(u.min() >= 0.0);
  }
}
