#include "chemolab/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

#include "chemolab/error.hpp"
#include "chemolab/format.hpp"

namespace chemolab::experiment {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void close_checked(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

gn::CgnEstimate estimate_for(const ExperimentConfig& config) {
  gn::EstimateOptions opts;
  opts.budget = config.classify.budget;
  opts.seed = config.seed;
  return gn::estimate_cgn(gn::GNInstance{config.grid}, opts);
}

}  // namespace

std::string regime_label(const kinetics::RegimeReport& report) {
  std::string label = kinetics::to_string(report.regime);
  if (report.regime == kinetics::Regime::NotCovered && !report.reason.empty())
    label += " (" + report.reason + ")";
  return label;
}

ClassifyResult cmd_classify(const ExperimentConfig& config,
                            const fs::path& out_dir,
                            const std::optional<gn::CgnEstimate>& cached) {
  ClassifyResult result;
  result.estimate = cached ? *cached : estimate_for(config);
  result.c_gn_estimated = !config.classify.c_gn.has_value();
  const double c_gn =
      result.c_gn_estimated ? result.estimate.lower_bound : *config.classify.c_gn;

  if (config.classify.u0_mass) {
    result.u0_mass = *config.classify.u0_mass;
  } else {
    const sim::SimState initial =
        sim::make_initial(config.initial, config.grid, config.tau, config.signal);
    result.u0_mass = integrate(initial.u);
  }
  result.report = kinetics::classify(config.source, config.chi, c_gn,
                                     result.u0_mass, config.grid.area());

  if (config.classify.c_gn_min) {
    const double lo = *config.classify.c_gn_min;
    const double hi = *config.classify.c_gn_max;
    constexpr int kScan = 9;
    for (int k = 0; k < kScan; ++k) {
      const double c = lo == hi ? lo : lo * std::pow(hi / lo, k / double(kScan - 1));
      result.c_gn_scan.push_back(kinetics::classify_regime(
          result.report.mu, config.chi, result.report.M, c));
      if (lo == hi) break;
    }
  }

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    const fs::path path = out_dir / "regime_report.txt";
    std::ofstream out = open_output(path);
    write_regime_report(out, result);
    close_checked(out, path);
  }
  return result;
}

void write_regime_report(std::ostream& out, const ClassifyResult& r) {
  const auto& rep = r.report;
  out << "regime: " << regime_label(rep) << '\n';
  out << "mu: " << format_real(rep.mu) << '\n';
  out << "mu_trend: " << kinetics::to_string(rep.mu_trend)
      << (rep.mu_closed_form ? " (closed form)" : " (estimated)") << '\n';
  out << "M: " << format_real(rep.M) << '\n';
  out << "u0_mass: " << format_real(r.u0_mass) << '\n';
  out << "C_GN: " << format_real(rep.c_gn)
      << (r.c_gn_estimated ? " (estimated lower bound)" : " (configured)") << '\n';
  out << "C_GN_lower_bound: " << format_real(r.estimate.lower_bound) << '\n';
  out << "threshold: " << format_real(rep.threshold) << '\n';
  out << "gap: " << format_real(rep.gap) << '\n';
  out << "epsilon0: " << (rep.epsilon0 ? format_real(*rep.epsilon0) : "n/a") << '\n';
  for (const auto& s : r.c_gn_scan)
    out << "scan C_GN=" << format_real(s.c_gn) << " gap=" << format_real(s.gap)
        << " regime=" << regime_label(s) << '\n';
}

int exit_code(const VerdictSummary& s) noexcept {
  switch (s.verdict) {
    case sim::Verdict::bounded:
      return 0;
    case sim::Verdict::blowup:
      return 2;
    case sim::Verdict::inconclusive:
      return 3;
  }
  return 3;
}

VerdictSummary cmd_run(const ExperimentConfig& config, const fs::path& out_dir,
                       const std::optional<gn::CgnEstimate>& cached) {
  const auto start = std::chrono::steady_clock::now();
  ensure_dir(out_dir);
  const ClassifyResult classified = cmd_classify(config, {}, cached);

  VerdictSummary summary;
  summary.report = classified.report;
  summary.config_hash = config.hash;

  const fs::path csv_path = out_dir / "diagnostics.csv";
  std::ofstream csv = open_output(csv_path);
  diag::write_csv_header(csv);

  const fs::path snap_dir = out_dir / "snapshots";
  if (config.run.snapshot_every > 0) ensure_dir(snap_dir);

  const sim::StepperOptions options = config.stepper_options();
  std::vector<diag::DiagnosticsRecord> series;
  auto hook = [&](const sim::SimState& s) {
    const bool last = s.status != sim::Status::running;
    if (last || s.step_count % config.run.record_every == 0) {
      const diag::DiagnosticsRecord* prev = series.empty() ? nullptr : &series.back();
      series.push_back(diag::record(s, options, prev));
      diag::write_csv_row(csv, series.back());
    }
    if (config.run.snapshot_every > 0 &&
        (last || s.step_count % config.run.snapshot_every == 0)) {
      char name[32];
      std::snprintf(name, sizeof name, "step_%08lld.txt",
                    static_cast<long long>(s.step_count));
      write_snapshot((snap_dir / name).string(), s.u, s.t);
    }
  };

  sim::SimState initial =
      sim::make_initial(config.initial, config.grid, config.tau, config.signal);
  sim::Integrator integrator(config.grid, options);
  const sim::RunResult result = integrator.run(std::move(initial), hook, 1);
  close_checked(csv, csv_path);

  summary.verdict = result.verdict;
  summary.status = result.final_state.status;
  summary.message = result.final_state.message;
  summary.steps = result.final_state.step_count;
  diag::BoundCaps caps;
  caps.u_linf = config.run.blowup_linf_cap;
  summary.bounds = diag::check_bounds(series, summary.report, caps);
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const fs::path verdict_path = out_dir / "verdict.txt";
  std::ofstream vout = open_output(verdict_path);
  write_verdict(vout, summary);
  close_checked(vout, verdict_path);
  return summary;
}

void write_verdict(std::ostream& out, const VerdictSummary& s) {
  out << sim::to_string(s.verdict) << '\n';
  out << "status: " << sim::to_string(s.status) << '\n';
  if (!s.message.empty()) out << "message: " << s.message << '\n';
  out << "regime: " << regime_label(s.report) << '\n';
  out << "M: " << format_real(s.report.M) << '\n';
  out << "gap: " << format_real(s.report.gap) << '\n';
  const auto& m = s.bounds.maxima;
  out << "max_u_l1: " << format_real(m.u_l1) << '\n';
  out << "max_u_l2: " << format_real(m.u_l2) << '\n';
  out << "max_u_linf: " << format_real(m.u_linf) << '\n';
  out << "max_u_lnu_l1: " << format_real(m.u_lnu_l1) << '\n';
  out << "max_entropy: " << format_real(m.entropy) << '\n';
  out << "max_v_l2: " << format_real(m.v_l2) << '\n';
  out << "max_grad_v_l2: " << format_real(m.grad_v_l2) << '\n';
  out << "max_grad_v_l4: " << format_real(m.grad_v_l4) << '\n';
  out << "max_delta_v_l2: " << format_real(m.delta_v_l2) << '\n';
  if (s.bounds.mass_bound_checked)
    out << "mass_bound: " << (s.bounds.mass_bound_ok ? "ok" : "exceeded")
        << " (sup u_l1 / M = " << format_real(s.bounds.mass_ratio) << ")\n";
  out << "growth_alarm: " << (s.bounds.growth_alarm ? "yes" : "no") << '\n';
  out << "steps: " << s.steps << '\n';
  out << "wall_time_s: " << format_real(s.wall_seconds) << '\n';
  out << "config_hash: " << hex64(s.config_hash) << '\n';
}

const char* const kPhaseHeader = "sweep_value,regime,verdict,max_u_linf,max_u_l1,M,gap";

void write_phase_csv(std::ostream& out, const std::vector<PhaseRow>& rows) {
  out << kPhaseHeader << '\n';
  for (const auto& r : rows)
    out << r.sweep_value << ',' << r.regime << ',' << r.verdict << ','
        << format_real(r.max_u_linf) << ',' << format_real(r.max_u_l1) << ','
        << format_real(r.M) << ',' << format_real(r.gap) << '\n';
}

std::vector<PhaseRow> cmd_sweep(const ExperimentConfig& config,
                                const fs::path& out_dir, int parallelism) {
  if (!config.sweep) throw ConfigError("sweep: missing [sweep] block", 0, "sweep");
  const SweepBlock& sweep = *config.sweep;
  ensure_dir(out_dir);

  // C_GN depends only on the grid, the seed and the classify block; estimate
  // it once unless the sweep changes one of those.
  std::optional<gn::CgnEstimate> cached;
  const bool affects_cgn = sweep.parameter.starts_with("grid.") ||
                           sweep.parameter.starts_with("classify.") ||
                           sweep.parameter == "initial.seed";
  if (!affects_cgn) cached = estimate_for(config);

  const std::size_t n = sweep.values.size();
  std::vector<PhaseRow> rows(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      PhaseRow& row = rows[k];
      row.sweep_value = sweep.values[k];
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.max_u_linf = row.max_u_l1 = row.M = row.gap = nan;
      row.regime = "n/a";
      try {
        RawConfig raw = config.raw;
        raw.set(sweep.parameter, sweep.values[k]);
        const ExperimentConfig run_config = build_config(raw);
        char name[32];
        std::snprintf(name, sizeof name, "run_%03zu", k);
        const VerdictSummary s = cmd_run(run_config, out_dir / name, cached);
        row.regime = regime_label(s.report);
        row.verdict = s.status == sim::Status::failed ? "failed" : sim::to_string(s.verdict);
        row.max_u_linf = s.bounds.maxima.u_linf;
        row.max_u_l1 = s.bounds.maxima.u_l1;
        row.M = s.report.M;
        row.gap = s.report.gap;
      } catch (const std::exception&) {
        row.verdict = "failed";
      }
    }
  };

  const int threads = std::max(1, parallelism > 0 ? parallelism : sweep.parallelism);
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < threads && static_cast<std::size_t>(t) < n; ++t)
      pool.emplace_back(worker);
    worker();
  }

  const fs::path path = out_dir / "phase.csv";
  std::ofstream out = open_output(path);
  write_phase_csv(out, rows);
  close_checked(out, path);
  return rows;
}

gn::CgnEstimate cmd_estimate_cgn(const ExperimentConfig& config) {
  return estimate_for(config);
}

}  // namespace chemolab::experiment
