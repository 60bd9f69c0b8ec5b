#include "chemolab/integrator.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <utility>

#include "chemolab/diffusion.hpp"
#include "chemolab/error.hpp"
#include "chemolab/format.hpp"

namespace chemolab::sim {

std::string to_string(Status status) {
  switch (status) {
    case Status::running:
      return "running";
    case Status::completed:
      return "completed";
    case Status::blowup_detected:
      return "blowup_detected";
    case Status::failed:
      return "failed";
  }
  return {};
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::bounded:
      return "bounded";
    case Verdict::blowup:
      return "blowup";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return {};
}

void StepperOptions::validate() const {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("tau must be >= 0");
  if (!(chi >= 0.0) || !std::isfinite(chi)) throw DomainError("chi must be >= 0");
  if (!(cfl > 0.0 && cfl < 1.0)) throw DomainError("cfl must lie in (0, 1)");
  if (!(dt_min > 0.0)) throw DomainError("dt_min must be > 0");
  if (!(dt_max >= dt_min)) throw DomainError("dt_max must be >= dt_min");
  if (!(blowup_linf_cap > 0.0)) throw DomainError("blowup_linf_cap must be > 0");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be >= 0");
  if (!(elliptic.tol > 0.0)) throw DomainError("elliptic tol must be > 0");
}

double reaction_update(const kinetics::SourceSpec& source, double u_star,
                       double dt) {
  using kinetics::Family;
  if (dt == 0.0 || source.family() == Family::zero) return u_star;

  if (source.family() == Family::logistic_power && source.exponent() == 2.0) {
    // b dt w^2 + (1 - a dt) w - u* = 0, nonnegative root in cancellation-free form
    const double lin = 1.0 - source.a() * dt;
    const double quad = source.b() * dt;
    const double disc = std::sqrt(lin * lin + 4.0 * quad * u_star);
    if (lin + disc <= 0.0) return 0.0;
    return 2.0 * u_star / (lin + disc);
  }

  auto phi = [&](double w) {
    const auto fs = source.value_and_slope(w);
    return std::pair<double, double>(w - dt * fs.value - u_star,
                                     1.0 - dt * fs.slope);
  };
  // phi(0) = -dt f(0) - u* <= 0 because f(0) >= 0.
  if (phi(0.0).first == 0.0) return 0.0;
  double hi = u_star + dt * std::max(source(u_star), 0.0) + 1.0;
  for (int k = 0; phi(hi).first <= 0.0; ++k) {
    if (k > 200)
      throw DivergedFieldError("reaction substep: no root bracket above u* = " +
                               format_real(u_star));
    hi *= 2.0;
  }
  const double guess = std::clamp(u_star, 0.0, hi);
  try {
    std::uintmax_t iters = 100;
    const double w = boost::math::tools::newton_raphson_iterate(
        phi, guess, 0.0, hi, 50, iters);
    // When a dt > 1 phi dips below zero before rising, and Newton from u*
    // can slide to the lower bound; keep its answer only if it is a root.
    const double scale = u_star + dt * std::abs(source(w));
    if (w >= 0.0 && w <= hi && std::isfinite(w) &&
        std::abs(phi(w).first) <= 1e-13 * scale)
      return w;
  } catch (const std::exception&) {
  }
  // Newton gave up; the sign bracket [0, hi] always holds a root.
  std::uintmax_t iters = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      [&](double w) { return phi(w).first; }, 0.0, hi,
      boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (bracket.first + bracket.second);
}

Integrator::Integrator(const Grid& grid, StepperOptions options)
    : grid_(grid),
      options_(std::move(options)),
      stencil_(std::make_unique<ops::StencilWorkspace>(grid)),
      diffusion_(std::make_unique<ImplicitDiffusion>(grid)),
      helmholtz_(std::make_unique<elliptic::HelmholtzSolver>(grid)),
      scratch_(std::make_unique<ScalarField>(grid)),
      rhs_(std::make_unique<ScalarField>(grid)) {
  options_.validate();
}

Integrator::~Integrator() = default;
Integrator::Integrator(Integrator&&) noexcept = default;
Integrator& Integrator::operator=(Integrator&&) noexcept = default;

double Integrator::admissible_dt(const ScalarField& v) const {
  const double rate = ops::max_outflow_rate(v, options_.chi);
  const double transport = rate > 0.0 ? options_.cfl / rate
                                      : std::numeric_limits<double>::infinity();
  return std::min(transport, options_.dt_max);
}

void Integrator::advection_substep(ScalarField& u, const ScalarField& v,
                                   double dt) {
  ops::chemotactic_divergence(u, v, options_.chi, options_.scheme, *stencil_,
                              *scratch_);
  auto out = u.values();
  auto rate = scratch_->values();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += dt * rate[k];
}

void Integrator::diffusion_substep(ScalarField& u, double dt) {
  diffusion_->apply(u, dt);
}

void Integrator::reaction_substep(ScalarField& u, double dt) const {
  for (double& x : u.values()) x = reaction_update(options_.source, x, dt);
}

void Integrator::signal_substep(SimState& state, const ScalarField& u_old,
                                double dt) {
  ScalarField& v = state.v;
  double shift = 1.0;
  if (options_.tau == 0.0) {
    *rhs_ = state.u;
  } else {
    const double rate = options_.tau / dt;
    shift = rate + 1.0;
    auto rhs = rhs_->values();
    auto vv = v.values();
    auto uu = u_old.values();
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = rate * vv[k] + uu[k];
  }
  helmholtz_->solve(*rhs_, shift, v, options_.elliptic);
  if (rhs_->min() >= 0.0) {
    const double floor = elliptic::maximum_principle_floor(*rhs_, options_.elliptic);
    for (double& x : v.values()) {
      if (x >= 0.0) continue;
      if (x < floor)
        throw PositivityError("signal update violates maximum principle: v = " +
                              format_real(x));
      x = 0.0;
    }
  }
}

void Integrator::step(SimState& state) {
  if (state.status != Status::running) return;
  const double remaining = options_.t_end - state.t;
  if (remaining <= 0.0) {
    state.status = Status::completed;
    return;
  }
  try {
    const double bound = admissible_dt(state.v);
    if (bound < options_.dt_min) {
      state.status = Status::blowup_detected;
      state.message = "dt collapse: admissible dt " + format_real(bound) +
                      " < dt_min at t = " + format_real(state.t);
      return;
    }
    const double dt = std::min(bound, remaining);
    const ScalarField u_old = state.u;

    advection_substep(state.u, state.v, dt);
    diffusion_substep(state.u, dt);
    reaction_substep(state.u, dt);
    signal_substep(state, u_old, dt);

    // Land exactly on t_end when the step was limited by the remaining time.
    state.t = dt == remaining ? options_.t_end : state.t + dt;
    state.dt = dt;
    ++state.step_count;
    if (!state.u.all_finite() || !state.v.all_finite())
      throw DivergedFieldError("non-finite value after step");
    if (state.u.min() < 0.0)
      throw PositivityError("u < 0 after step: " + format_real(state.u.min()));
    if (state.t >= options_.t_end) state.status = Status::completed;
  } catch (const Error& e) {
    state.status = Status::failed;
    state.message = e.what();
  }
}

RunResult Integrator::run(SimState state, const RecordHook& hook,
                          int record_every) {
  if (record_every < 1) record_every = 1;
  const double cap = options_.blowup_linf_cap;
  auto over_cap = [&](const SimState& s) {
    return !(norm(s.u, Norm::Linf) <= cap);
  };

  if (state.status == Status::running && state.t >= options_.t_end)
    state.status = Status::completed;
  if (hook) hook(state);
  std::int64_t last_recorded = state.step_count;

  if (over_cap(state)) {
    state.status = Status::blowup_detected;
    state.message = "initial ||u||_inf exceeds blowup_linf_cap";
  }
  while (state.status == Status::running) {
    step(state);
    if (state.status != Status::failed && over_cap(state)) {
      state.status = Status::blowup_detected;
      state.message = "||u||_inf = " + format_real(norm(state.u, Norm::Linf)) +
                      " exceeds blowup_linf_cap at t = " + format_real(state.t);
    }
    if (hook && state.status == Status::running &&
        state.step_count - last_recorded >= record_every) {
      hook(state);
      last_recorded = state.step_count;
    }
  }
  if (hook && state.step_count != last_recorded) hook(state);

  Verdict verdict = Verdict::inconclusive;
  if (state.status == Status::completed) verdict = Verdict::bounded;
  if (state.status == Status::blowup_detected) verdict = Verdict::blowup;
  return RunResult{std::move(state), verdict};
}

SimState step(const SimState& state, const StepperOptions& options) {
  Integrator integrator(state.u.grid(), options);
  SimState next = state;
  integrator.step(next);
  return next;
}

RunResult run(SimState initial, const StepperOptions& options,
              const RecordHook& hook, int record_every) {
  Integrator integrator(initial.u.grid(), options);
  return integrator.run(std::move(initial), hook, record_every);
}

double unit_uniform(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

ScalarField initial_density(const ConstantInit& init, const Grid& grid) {
  if (!(init.value > 0.0) || !std::isfinite(init.value))
    throw DomainError("constant initial density must be > 0");
  return ScalarField(grid, init.value);
}

ScalarField initial_density(const GaussianBumpInit& init, const Grid& grid) {
  if (!(init.mass > 0.0) || !std::isfinite(init.mass))
    throw DomainError("gaussian_bump: mass must be > 0");
  if (!(init.width > 0.0)) throw DomainError("gaussian_bump: width must be > 0");
  const double inv = 1.0 / (2.0 * init.width * init.width);
  ScalarField u = ScalarField::from_function(grid, [&](double x, double y) {
    const double dx = x - init.center_x;
    const double dy = y - init.center_y;
    return std::exp(-(dx * dx + dy * dy) * inv);
  });
  const double total = integrate(u);
  if (!(total > 0.0))
    throw DomainError("gaussian_bump: bump vanishes on this grid");
  u *= init.mass / total;
  return u;
}

ScalarField initial_density(const RandomPerturbationInit& init,
                            const Grid& grid) {
  if (!(init.base > 0.0)) throw DomainError("random_perturbation: base must be > 0");
  if (!(init.amplitude >= 0.0 && init.amplitude < init.base))
    throw DomainError("random_perturbation: need 0 <= amplitude < base");
  std::uint64_t state = init.seed;
  ScalarField u(grid);
  for (double& x : u.values())
    x = init.base + init.amplitude * (2.0 * unit_uniform(splitmix64(state)) - 1.0);
  return u;
}

}  // namespace

SimState make_initial(const InitialKind& kind, const Grid& grid, double tau,
                      InitialSignal signal) {
  if (!(tau >= 0.0)) throw DomainError("make_initial: tau must be >= 0");
  ScalarField u = std::visit(
      [&](const auto& init) { return initial_density(init, grid); }, kind);
  ScalarField v = (signal == InitialSignal::zero && tau > 0.0)
                      ? ScalarField(grid, 0.0)
                      : elliptic::solve_helmholtz(u);
  for (double& x : v.values()) x = std::max(x, 0.0);
  return SimState{.t = 0.0, .u = std::move(u), .v = std::move(v), .dt = 0.0,
                  .step_count = 0, .status = Status::running, .message = {}};
}

}  // namespace chemolab::sim
