#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chemolab/config.hpp"
#include "chemolab/diagnostics.hpp"
#include "chemolab/gn_estimator.hpp"
#include "chemolab/integrator.hpp"
#include "chemolab/kinetics.hpp"

namespace chemolab::experiment {

struct ClassifyResult {
  kinetics::RegimeReport report;
  double u0_mass = 0.0;
  bool c_gn_estimated = false;
  /// Always computed: the sanity floor printed next to a configured C_GN.
  gn::CgnEstimate estimate;
  /// Verdicts across [c_gn_min, c_gn_max] when configured.
  std::vector<kinetics::RegimeReport> c_gn_scan;
};

/// "NotCovered (M unbounded)" style label.
std::string regime_label(const kinetics::RegimeReport& report);

/// Classifies the configured source. Writes regime_report.txt into out_dir
/// unless out_dir is empty. `c_gn` overrides the configured constant (used by
/// sweeps to estimate it once).
ClassifyResult cmd_classify(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir,
                            const std::optional<gn::CgnEstimate>& cached = {});
void write_regime_report(std::ostream& out, const ClassifyResult& result);

struct VerdictSummary {
  sim::Verdict verdict = sim::Verdict::inconclusive;
  sim::Status status = sim::Status::running;
  std::string message;
  kinetics::RegimeReport report;
  diag::BoundCheckSummary bounds;
  double wall_seconds = 0.0;
  std::int64_t steps = 0;
  std::uint64_t config_hash = 0;
};

/// Exit status of `run`: 0 bounded, 2 blowup, 3 failed or inconclusive.
int exit_code(const VerdictSummary& summary) noexcept;

/// Runs the simulation, writing diagnostics.csv, verdict.txt and (when
/// snapshot_every > 0) snapshots/step_NNNNNNNN.txt into out_dir.
/// Throws IoError when an output cannot be written.
VerdictSummary cmd_run(const ExperimentConfig& config,
                       const std::filesystem::path& out_dir,
                       const std::optional<gn::CgnEstimate>& cached = {});
void write_verdict(std::ostream& out, const VerdictSummary& summary);

struct PhaseRow {
  std::string sweep_value;
  std::string regime;
  std::string verdict;  ///< bounded | blowup | inconclusive | failed
  double max_u_linf = 0.0;
  double max_u_l1 = 0.0;
  double M = 0.0;
  double gap = 0.0;
};

extern const char* const kPhaseHeader;

/// One run per sweep value in out_dir/run_NNN, at most `parallelism` at a
/// time (0 uses the configured value). Writes phase.csv. A run that throws is
/// recorded with verdict "failed" and the sweep continues. The table does not
/// depend on the parallelism.
std::vector<PhaseRow> cmd_sweep(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir,
                                int parallelism = 0);
void write_phase_csv(std::ostream& out, const std::vector<PhaseRow>& rows);

gn::CgnEstimate cmd_estimate_cgn(const ExperimentConfig& config);

}  // namespace chemolab::experiment
