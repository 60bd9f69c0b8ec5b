#include "chemolab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "chemolab/error.hpp"
#include "chemolab/format.hpp"
#include "chemolab/operators.hpp"

namespace chemolab::diag {

const char* const kCsvHeader =
    "t,dt,u_l1,u_l2,u_linf,u_lnu_l1,entropy,v_l2,grad_v_l2,grad_v_l4,"
    "delta_v_l2,mass_odi_residual,step_count";

DiagnosticsRecord record(const sim::SimState& state,
                         const sim::StepperOptions& options,
                         const DiagnosticsRecord* prev) {
  DiagnosticsRecord rec;
  rec.t = state.t;
  rec.dt = state.dt;
  rec.step_count = state.step_count;
  try {
    const ScalarField& u = state.u;
    const ScalarField& v = state.v;
    rec.u_l1 = norm(u, Norm::L1);
    rec.u_l2 = norm(u, Norm::L2);
    rec.u_linf = norm(u, Norm::Linf);
    rec.u_lnu_l1 = abs_entropy_integrand(u);
    rec.v_l2 = norm(v, Norm::L2);

    const ScalarField grad2 = ops::gradient_squared(v);
    double s2 = 0.0;
    double s4 = 0.0;
    for (double g : grad2.values()) {
      s2 += g;
      s4 += g * g;
    }
    const double area = v.grid().cell_area();
    rec.grad_v_l2 = std::sqrt(area * s2);
    rec.grad_v_l4 = std::sqrt(std::sqrt(area * s4));
    rec.entropy = entropy_integrand(u) +
                  0.5 * options.tau * options.chi * rec.grad_v_l2 * rec.grad_v_l2;
    rec.delta_v_l2 = norm(ops::laplacian(v), Norm::L2);

    double fsum = 0.0;
    for (double x : u.values()) fsum += options.source(x);
    rec.source_integral = u.grid().cell_area() * fsum;

    if (prev != nullptr && !prev->diverged && rec.t > prev->t)
      rec.mass_odi_residual =
          (rec.u_l1 - prev->u_l1) / (rec.t - prev->t) - prev->source_integral;

    const double fields[] = {rec.u_l1, rec.u_l2, rec.u_linf, rec.u_lnu_l1,
                             rec.entropy, rec.v_l2, rec.grad_v_l2, rec.grad_v_l4,
                             rec.delta_v_l2, rec.mass_odi_residual,
                             rec.source_integral};
    for (double x : fields)
      if (!std::isfinite(x)) rec.diverged = true;
  } catch (const Error&) {
    rec.diverged = true;
  }
  if (rec.diverged) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double* x : {&rec.u_l1, &rec.u_l2, &rec.u_linf, &rec.u_lnu_l1,
                      &rec.entropy, &rec.v_l2, &rec.grad_v_l2, &rec.grad_v_l4,
                      &rec.delta_v_l2, &rec.mass_odi_residual,
                      &rec.source_integral})
      if (!std::isfinite(*x)) *x = nan;
  }
  return rec;
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const DiagnosticsRecord& r) {
  const double cols[] = {r.t,       r.dt,        r.u_l1,      r.u_l2,
                         r.u_linf,  r.u_lnu_l1,  r.entropy,   r.v_l2,
                         r.grad_v_l2, r.grad_v_l4, r.delta_v_l2,
                         r.mass_odi_residual};
  for (double c : cols) out << format_real(c) << ',';
  out << r.step_count << '\n';
}

namespace {

void update_max(double& acc, double x) {
  if (std::isnan(x)) return;
  acc = std::max(acc, x);
}

}  // namespace

BoundCheckSummary check_bounds(std::span<const DiagnosticsRecord> series,
                               const kinetics::RegimeReport& report,
                               const BoundCaps& caps) {
  if (series.empty()) throw DomainError("check_bounds: empty series");
  BoundCheckSummary s;
  s.records = series.size();
  const double ninf = -std::numeric_limits<double>::infinity();
  DiagnosticsRecord& m = s.maxima;
  for (double* x : {&m.t, &m.dt, &m.u_l1, &m.u_l2, &m.u_linf, &m.u_lnu_l1,
                    &m.entropy, &m.v_l2, &m.grad_v_l2, &m.grad_v_l4,
                    &m.delta_v_l2, &m.mass_odi_residual, &m.source_integral})
    *x = ninf;
  m.step_count = series.front().step_count;

  for (const auto& r : series) {
    s.diverged = s.diverged || r.diverged;
    update_max(m.t, r.t);
    update_max(m.dt, r.dt);
    update_max(m.u_l1, r.u_l1);
    update_max(m.u_l2, r.u_l2);
    update_max(m.u_linf, r.u_linf);
    update_max(m.u_lnu_l1, r.u_lnu_l1);
    update_max(m.entropy, r.entropy);
    update_max(m.v_l2, r.v_l2);
    update_max(m.grad_v_l2, r.grad_v_l2);
    update_max(m.grad_v_l4, r.grad_v_l4);
    update_max(m.delta_v_l2, r.delta_v_l2);
    update_max(m.mass_odi_residual, r.mass_odi_residual);
    update_max(m.source_integral, r.source_integral);
    m.step_count = std::max(m.step_count, r.step_count);
  }
  m.diverged = s.diverged;

  auto cap_check = [&](const char* name, double value, double cap) {
    if (!(value <= cap)) {
      s.caps_ok = false;
      s.exceeded.emplace_back(name);
    }
  };
  cap_check("u_linf", m.u_linf, caps.u_linf);
  cap_check("u_l2", m.u_l2, caps.u_l2);
  cap_check("entropy", m.entropy, caps.entropy);
  cap_check("grad_v_l4", m.grad_v_l4, caps.grad_v_l4);
  cap_check("delta_v_l2", m.delta_v_l2, caps.delta_v_l2);
  if (s.diverged) s.caps_ok = false;

  if (std::isfinite(report.M) && report.M > 0.0) {
    s.mass_bound_checked = true;
    s.mass_ratio = m.u_l1 / report.M;
    s.mass_bound_ok = m.u_l1 <= report.M * (1.0 + caps.mass_slack);
  }

  // Growth alarm over the trailing window of recorded time.
  const double t0 = series.front().t;
  const double t1 = series.back().t;
  const double start = t1 - caps.growth_window * (t1 - t0);
  std::size_t first = series.size() - 1;
  while (first > 0 && series[first - 1].t >= start) --first;
  if (first + 1 < series.size()) {
    bool monotone = true;
    for (std::size_t k = first + 1; k < series.size(); ++k)
      if (!(series[k].u_linf >= series[k - 1].u_linf)) monotone = false;
    const double base = series[first].u_linf;
    s.growth = base > 0.0 ? series.back().u_linf / base - 1.0 : 0.0;
    s.growth_alarm = monotone && s.growth > caps.growth_alarm_ratio;
  }
  return s;
}

bool entropy_plateau(std::span<const DiagnosticsRecord> series, double factor) {
  if (series.size() < 2) return true;
  const double mid = 0.5 * (series.front().t + series.back().t);
  double first = -std::numeric_limits<double>::infinity();
  double second = first;
  for (const auto& r : series) {
    if (r.t <= mid)
      first = std::max(first, r.entropy);
    else
      second = std::max(second, r.entropy);
  }
  if (!std::isfinite(second)) return true;
  return second <= first + (factor - 1.0) * std::abs(first);
}

}  // namespace chemolab::diag
