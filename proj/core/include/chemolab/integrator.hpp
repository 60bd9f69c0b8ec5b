#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <variant>

#include "chemolab/elliptic.hpp"
#include "chemolab/grid.hpp"
#include "chemolab/kinetics.hpp"
#include "chemolab/operators.hpp"

namespace chemolab::sim {

class ImplicitDiffusion;

enum class Status { running, completed, blowup_detected, failed };
std::string to_string(Status status);

/// Solution pair (u, v) at time t.
/// While status == running: u >= 0 cellwise, and v >= 0 when v(0) >= 0.
struct SimState {
  double t = 0.0;
  ScalarField u;
  ScalarField v;
  double dt = 0.0;  ///< length of the last step taken
  std::int64_t step_count = 0;
  Status status = Status::running;
  std::string message;  ///< reason for blowup_detected / failed
};

struct StepperOptions {
  double tau = 0.0;
  double chi = 1.0;
  double cfl = 0.4;
  double dt_min = 1e-12;
  /// Upper bound on the step; accuracy control once transport is slow.
  double dt_max = 1e-3;
  double blowup_linf_cap = 1e8;
  double t_end = 1.0;
  kinetics::SourceSpec source = kinetics::SourceSpec::zero();
  ops::FluxScheme scheme = ops::FluxScheme::upwind;
  elliptic::EllipticOptions elliptic;

  /// Throws DomainError unless tau >= 0, chi >= 0, 0 < cfl < 1,
  /// 0 < dt_min <= dt_max, cap > 0 and t_end >= 0.
  void validate() const;
};

enum class Verdict { bounded, blowup, inconclusive };
std::string to_string(Verdict verdict);

struct RunResult {
  SimState final_state;
  Verdict verdict;
};

using RecordHook = std::function<void(const SimState&)>;

/// Advances the coupled system
///   u_t = Lap u - chi div(u grad v) + f(u),   tau v_t = Lap v - v + u
/// by first-order operator splitting:
///   1. explicit upwind chemotaxis with dt * max_outflow_rate <= cfl,
///   2. backward-Euler diffusion (exact DCT solve),
///   3. per-cell backward-Euler reaction u = u* + dt f(u), root in [0, inf),
///   4. signal: tau = 0 solves (I - Lap) v = u; tau > 0 solves
///      ((tau/dt + 1) I - Lap) v_new = (tau/dt) v + u_old,
///      both warm-started from the previous v.
/// Every substep maps u >= 0 to u >= 0; 1 and 2 conserve integrate(u).
class Integrator {
 public:
  Integrator(const Grid& grid, StepperOptions options);
  ~Integrator();
  Integrator(Integrator&&) noexcept;
  Integrator& operator=(Integrator&&) noexcept;

  const StepperOptions& options() const noexcept { return options_; }

  /// Largest dt allowed by the transport bound and dt_max (ignores t_end).
  double admissible_dt(const ScalarField& v) const;

  /// One step. Sets status to completed at t_end, blowup_detected if the
  /// transport bound forces dt < dt_min, failed on a non-finite value or a
  /// positivity violation. A state that is not running is left unchanged.
  void step(SimState& state);

  /// Steps to t_end. Records through `hook` at the initial state, every
  /// `record_every` steps and at the final state. The verdict is bounded only
  /// if t_end is reached with ||u||_inf <= blowup_linf_cap throughout.
  RunResult run(SimState state, const RecordHook& hook = {},
                int record_every = 1);

  // Individual substeps, exposed for conservation checks.
  void advection_substep(ScalarField& u, const ScalarField& v, double dt);
  void diffusion_substep(ScalarField& u, double dt);
  void reaction_substep(ScalarField& u, double dt) const;
  void signal_substep(SimState& state, const ScalarField& u_old, double dt);

 private:
  Grid grid_;
  StepperOptions options_;
  std::unique_ptr<ops::StencilWorkspace> stencil_;
  std::unique_ptr<ImplicitDiffusion> diffusion_;
  std::unique_ptr<elliptic::HelmholtzSolver> helmholtz_;
  std::unique_ptr<ScalarField> scratch_;
  std::unique_ptr<ScalarField> rhs_;
};

/// Backward-Euler root w = u_star + dt f(w), w >= 0, for one cell.
double reaction_update(const kinetics::SourceSpec& source, double u_star,
                       double dt);

/// Convenience wrappers that build a throwaway Integrator.
SimState step(const SimState& state, const StepperOptions& options);
RunResult run(SimState initial, const StepperOptions& options,
              const RecordHook& hook = {}, int record_every = 1);

// ---- initial data ----

struct ConstantInit {
  double value;
};
struct GaussianBumpInit {
  double center_x;
  double center_y;
  double width;
  double mass;
};
struct RandomPerturbationInit {
  std::uint64_t seed;
  double amplitude;
  double base;
};
using InitialKind = std::variant<ConstantInit, GaussianBumpInit, RandomPerturbationInit>;

enum class InitialSignal { elliptic, zero };

/// u0 per `kind` (bumps renormalised so integrate(u0) == mass exactly up to
/// roundoff); v0 = solve_helmholtz(u0) unless `signal` is zero (tau > 0 only).
/// Throws DomainError for infeasible parameters.
SimState make_initial(const InitialKind& kind, const Grid& grid, double tau,
                      InitialSignal signal = InitialSignal::elliptic);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw; identical
/// on every standard library.
double unit_uniform(std::uint64_t bits) noexcept;

/// SplitMix64 step, used to derive independent seeded sub-streams.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

}  // namespace chemolab::sim
