#include <doctest.h>

#include <chemolab/error.hpp>
#include <chemolab/integrator.hpp>
#include <chemolab/operators.hpp>

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <vector>

#include "property.hpp"

using namespace chemolab;
using namespace chemolab::sim;
using kinetics::SourceSpec;

namespace {

SimState uniform_state(const Grid& g, double u, double v) {
  return SimState{.t = 0.0, .u = ScalarField(g, u), .v = ScalarField(g, v), .dt = 0.0,
                  .step_count = 0, .status = Status::running, .message = {}};
}

// High-accuracy solution of u' = u - u^2 by adaptive Runge-Kutta.
double logistic_ode(double u0, double t_end) {
  namespace odeint = boost::numeric::odeint;
  std::vector<double> x{u0};
  auto rhs = [](const std::vector<double>& y, std::vector<double>& dy, double) {
    dy[0] = y[0] - y[0] * y[0];
  };
  odeint::integrate_adaptive(
      odeint::make_controlled<odeint::runge_kutta_dopri5<std::vector<double>>>(1e-14, 1e-14),
      rhs, x, 0.0, t_end, 1e-4);
  return x[0];
}

SourceSpec random_source(proptest::Rng& rng) {
  const double a = rng.uniform(-1.0, 3.0);
  const double b = rng.log_uniform(0.1, 3.0);
  switch (rng.integer(0, 4)) {
    case 0:
      return SourceSpec::zero();
    case 1:
      return SourceSpec::logistic_power(a, b, rng.uniform() < 0.5 ? 2.0 : rng.uniform(1.2, 3.0));
    case 2:
      return SourceSpec::sublog_power(a, b, rng.uniform(0.1, 1.0));
    case 3:
      return SourceSpec::sublog_loglog(a, b);
    default:
      return SourceSpec::tabulated({{0, rng.uniform(0, 1)}, {1, 1}, {4, -3}});
  }
}

}  // namespace

TEST_CASE("homogeneous steady states are fixed points") {
  const Grid g(12, 10, 1.0, 0.8);
  for (double tau : {0.0, 1.0}) {
    StepperOptions opts;
    opts.tau = tau;
    opts.chi = 3.0;
    Integrator integ(g, opts);
    SimState s = uniform_state(g, 2.0, 2.0);
    for (int k = 0; k < 100; ++k) integ.step(s);
    CHECK(s.status == Status::running);
    for (double x : s.u.values()) CHECK(std::abs(x - 2.0) <= 1e-12);
    for (double x : s.v.values()) CHECK(std::abs(x - 2.0) <= 1e-12);

    opts.source = SourceSpec::logistic_power(1, 1, 2);
    Integrator logistic(g, opts);
    SimState one = uniform_state(g, 1.0, 1.0);
    for (int k = 0; k < 100; ++k) logistic.step(one);
    for (double x : one.u.values()) CHECK(std::abs(x - 1.0) <= 1e-12);
  }
}

TEST_CASE("uniform logistic dynamics follow the scalar ODE") {
  const Grid g = Grid::unit_square(4);
  for (double u0 : {1.0, 0.1}) {
    StepperOptions opts;
    opts.source = SourceSpec::logistic_power(1, 1, 2);
    opts.t_end = 5.0;
    opts.dt_max = 1e-6;
    const RunResult r = run(uniform_state(g, u0, u0), opts);
    CHECK(r.verdict == Verdict::bounded);
    CHECK(r.final_state.t == 5.0);
    const double exact = logistic_ode(u0, 5.0);
    for (double x : r.final_state.u.values()) CHECK(std::abs(x - exact) <= 1e-6);
  }
}

TEST_CASE("pure heat equation conserves mass and decays toward the mean") {
  const Grid g(24, 16, 1.5, 1.0);
  proptest::Rng rng(0x1e01);
  StepperOptions opts;
  opts.chi = 0.0;
  opts.dt_max = 1e-3;
  Integrator integ(g, opts);
  auto init = make_initial(RandomPerturbationInit{7, 0.5, 1.0}, g, 0.0);
  const double mass = integrate(init.u);
  const double mean = mass / g.area();
  double prev = norm(init.u - ScalarField(g, mean), Norm::L2);
  double prev_mass = mass;
  for (int k = 0; k < 200; ++k) {
    integ.step(init);
    const double m = integrate(init.u);
    CHECK(std::abs(m - prev_mass) <= 1e-12 * mass);
    prev_mass = m;
    const double dev = norm(init.u - ScalarField(g, mean), Norm::L2);
    CHECK(dev < prev);
    prev = dev;
  }
}

TEST_CASE("property: randomized steps keep u >= 0 and transport conserves mass") {
  proptest::Rng rng(0x1e02);
  int steps = 0;
  while (steps < 1000) {
    const Grid g = proptest::random_grid(rng, 4, 20);
    StepperOptions opts;
    opts.tau = rng.uniform() < 0.5 ? 0.0 : rng.log_uniform(1e-3, 10.0);
    opts.chi = rng.log_uniform(0.01, 20.0);
    opts.cfl = rng.uniform(0.05, 0.95);
    opts.dt_max = rng.log_uniform(1e-5, 1e-1);
    opts.source = random_source(rng);
    opts.t_end = 1e9;
    Integrator integ(g, opts);
    auto u = proptest::random_field(g, rng, 0.0, rng.log_uniform(0.1, 100.0));
    for (double& x : u.values())
      if (rng.uniform() < 0.3) x = 0.0;
    SimState s{.t = 0.0, .u = u, .v = proptest::random_field(g, rng, 0.0, 50.0), .dt = 0.0,
               .step_count = 0, .status = Status::running, .message = {}};
    for (int k = 0; k < 25; ++k, ++steps) {
      const double dt = std::min(integ.admissible_dt(s.v), 1.0);
      ScalarField w = s.u;
      const double before = integrate(w);
      integ.advection_substep(w, s.v, dt);
      CHECK(w.min() >= 0.0);
      integ.diffusion_substep(w, dt);
      CHECK(w.min() >= 0.0);
      CHECK(std::abs(integrate(w) - before) <= 1e-12 * std::max(before, 1e-300));

      integ.step(s);
      REQUIRE(s.status == Status::running);
      CHECK(s.u.min() >= 0.0);
      CHECK(s.v.min() >= 0.0);
    }
  }
}

TEST_CASE("reaction substep solves w = u* + dt f(w) with w >= 0") {
  proptest::Rng rng(0x1e03);
  for (int trial = 0; trial < 5000; ++trial) {
    const auto f = random_source(rng);
    const double u_star = rng.uniform() < 0.1 ? 0.0 : rng.log_uniform(1e-6, 1e6);
    const double dt = rng.log_uniform(1e-6, 1.0);
    const double w = reaction_update(f, u_star, dt);
    CHECK(w >= 0.0);
    const double scale = u_star + dt * std::abs(f(w)) + 1e-300;
    INFO(f.describe(), " u*=", u_star, " dt=", dt, " w=", w);
    if (w > 0.0) CHECK(std::abs(w - dt * f(w) - u_star) <= 1e-10 * scale);
  }
}

TEST_CASE("mass change per step is dt * integral f(u*) up to O(dt^2)") {
  const Grid g = Grid::unit_square(16);
  StepperOptions opts;
  opts.source = SourceSpec::logistic_power(1, 1, 2);
  opts.chi = 0.5;
  const auto init = make_initial(GaussianBumpInit{0.5, 0.5, 0.2, 1.0}, g, 0.0);
  auto defect = [&](double dt) {
    StepperOptions o = opts;
    o.dt_max = dt;
    Integrator integ(g, o);
    ScalarField w = init.u;
    integ.advection_substep(w, init.v, dt);
    integ.diffusion_substep(w, dt);
    double fsum = 0.0;
    for (double x : w.values()) fsum += o.source(x);
    const double before = integrate(init.u);
    integ.reaction_substep(w, dt);
    return std::abs(integrate(w) - before - dt * fsum * g.cell_area());
  };
  const double d1 = defect(1e-3);
  const double d2 = defect(5e-4);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("small tau tracks the quasi-static limit") {
  const Grid g = Grid::unit_square(32);
  const GaussianBumpInit bump{0.5, 0.5, 0.15, 2.0};
  std::vector<double> l2_elliptic, l2_tau;
  for (double tau : {0.0, 1e-6}) {
    StepperOptions opts;
    opts.tau = tau;
    opts.chi = 2.0;
    opts.t_end = 0.5;
    auto& out = tau == 0.0 ? l2_elliptic : l2_tau;
    run(make_initial(bump, g, tau), opts,
        [&](const SimState& s) { out.push_back(norm(s.u, Norm::L2)); }, 50);
  }
  REQUIRE(l2_elliptic.size() == l2_tau.size());
  for (std::size_t k = 0; k < l2_tau.size(); ++k)
    CHECK(l2_tau[k] == doctest::Approx(l2_elliptic[k]).epsilon(0.02));
}

TEST_CASE("run verdicts") {
  const Grid g = Grid::unit_square(16);
  const auto init = make_initial(GaussianBumpInit{0.5, 0.5, 0.1, 1.0}, g, 0.0);

  StepperOptions opts;
  opts.t_end = 0.0;
  int records = 0;
  const auto zero = run(init, opts, [&](const SimState&) { ++records; });
  CHECK(zero.verdict == Verdict::bounded);
  CHECK(records == 1);
  CHECK(zero.final_state.step_count == 0);

  opts.t_end = 0.01;
  opts.blowup_linf_cap = 1.0;
  const auto capped = run(init, opts);
  CHECK(capped.verdict == Verdict::blowup);
  CHECK(capped.final_state.status == Status::blowup_detected);

  opts.blowup_linf_cap = 1e8;
  opts.chi = 50.0;
  opts.dt_min = 1e-2;
  opts.dt_max = 1e-2;
  const auto collapse = run(init, opts);
  CHECK(collapse.verdict == Verdict::blowup);
  CHECK(collapse.final_state.message.find("dt collapse") != std::string::npos);

  StepperOptions bad;
  bad.cfl = 1.0;
  CHECK_THROWS_AS(Integrator(g, bad), DomainError);
}

TEST_CASE("make_initial") {
  const Grid g(20, 10, 2.0, 1.0);
  const auto c = make_initial(ConstantInit{1.5}, g, 0.0);
  CHECK(integrate(c.u) == doctest::Approx(3.0).epsilon(1e-14));
  for (double x : c.v.values()) CHECK(x == doctest::Approx(1.5).epsilon(1e-9));

  const auto bump = make_initial(GaussianBumpInit{0.3, 0.7, 0.05, 1.0}, g, 1.0);
  CHECK(std::abs(integrate(bump.u) - 1.0) <= 1e-12);
  CHECK(bump.v.min() >= 0.0);
  const auto zero_v =
      make_initial(GaussianBumpInit{0.3, 0.7, 0.05, 1.0}, g, 1.0, InitialSignal::zero);
  CHECK(norm(zero_v.v, Norm::Linf) == 0.0);

  const auto r1 = make_initial(RandomPerturbationInit{42, 0.2, 1.0}, g, 0.0);
  const auto r2 = make_initial(RandomPerturbationInit{42, 0.2, 1.0}, g, 0.0);
  const auto r3 = make_initial(RandomPerturbationInit{43, 0.2, 1.0}, g, 0.0);
  CHECK(r1.u.min() >= 0.8);
  CHECK(r1.u.max() <= 1.2);
  bool same = true, differs = false;
  for (std::size_t k = 0; k < r1.u.size(); ++k) {
    same = same && r1.u[k] == r2.u[k];
    differs = differs || r1.u[k] != r3.u[k];
  }
  CHECK(same);
  CHECK(differs);

  CHECK_THROWS_AS(make_initial(GaussianBumpInit{0.5, 0.5, 0.1, 0.0}, g, 0.0), DomainError);
  CHECK_THROWS_AS(make_initial(RandomPerturbationInit{1, 1.0, 1.0}, g, 0.0), DomainError);
  CHECK_THROWS_AS(make_initial(ConstantInit{-1.0}, g, 0.0), DomainError);
}

TEST_CASE("unit_uniform is portable") {
  std::uint64_t state = 0;
  CHECK(splitmix64(state) == 0xe220a8397b1dcdafULL);
  CHECK(unit_uniform(0) == 0.0);
  CHECK(unit_uniform(~0ULL) < 1.0);
  CHECK(unit_uniform(1ULL << 63) == 0.5);
}
