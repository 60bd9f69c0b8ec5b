#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "chemolab/integrator.hpp"
#include "chemolab/kinetics.hpp"

namespace chemolab::diag {

/// Functionals of one state. Norms are discrete (see chemolab::norm).
struct DiagnosticsRecord {
  double t = 0.0;
  double dt = 0.0;
  double u_l1 = 0.0;
  double u_l2 = 0.0;
  double u_linf = 0.0;
  double u_lnu_l1 = 0.0;  ///< integral of |u ln u|
  double entropy = 0.0;   ///< integral of u ln u + (tau chi / 2) ||grad v||^2
  double v_l2 = 0.0;
  double grad_v_l2 = 0.0;
  double grad_v_l4 = 0.0;
  double delta_v_l2 = 0.0;
  /// (u_l1 - prev.u_l1) / (t - prev.t) - prev.source_integral: the defect of
  /// the discrete mass balance d/dt int u = int f(u) with the source taken at
  /// the left end of the interval. Zero for the first record.
  double mass_odi_residual = 0.0;
  std::int64_t step_count = 0;

  /// integral of f(u); kept for the next record's residual, not written to CSV.
  double source_integral = 0.0;
  bool diverged = false;
};

/// Never throws on bad fields: a non-finite functional or a negative density
/// marks the record as diverged instead.
DiagnosticsRecord record(const sim::SimState& state,
                         const sim::StepperOptions& options,
                         const DiagnosticsRecord* prev = nullptr);

/// Exact CSV header, no trailing newline.
extern const char* const kCsvHeader;
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const DiagnosticsRecord& rec);

struct BoundCaps {
  double u_linf = 1e8;
  double u_l2 = std::numeric_limits<double>::infinity();
  double entropy = std::numeric_limits<double>::infinity();
  double grad_v_l4 = std::numeric_limits<double>::infinity();
  double delta_v_l2 = std::numeric_limits<double>::infinity();
  /// Allowed relative excess of sup u_l1 over the mass bound M.
  double mass_slack = 0.01;
  /// Growth alarm window, as a fraction of the recorded time span.
  double growth_window = 0.1;
  /// Alarm when u_linf grows monotonically by more than this relative amount
  /// across the window.
  double growth_alarm_ratio = 0.1;
};

struct BoundCheckSummary {
  DiagnosticsRecord maxima;  ///< running maximum of every field
  bool caps_ok = true;
  std::vector<std::string> exceeded;  ///< names of capped fields over cap
  bool mass_bound_checked = false;    ///< false when M is infinite
  bool mass_bound_ok = true;
  double mass_ratio = 0.0;  ///< sup u_l1 / M
  /// Relative u_linf growth over the trailing window.
  double growth = 0.0;
  bool growth_alarm = false;
  bool diverged = false;
  std::size_t records = 0;
};

/// Requires a nonempty series (throws DomainError otherwise).
BoundCheckSummary check_bounds(std::span<const DiagnosticsRecord> series,
                               const kinetics::RegimeReport& report,
                               const BoundCaps& caps = {});

/// max(entropy over the second half of the recorded time) <=
/// max(entropy over the first half) + (factor - 1) * |that max|.
bool entropy_plateau(std::span<const DiagnosticsRecord> series,
                     double factor = 1.05);

}  // namespace chemolab::diag
