#include <doctest.h>

#include <chemolab/error.hpp>
#include <chemolab/experiment.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace chemolab;
using namespace chemolab::experiment;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("chemolab_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* const kSmall = R"(
[grid]
nx = 16
ny = 16
[source]
family = logistic 1 1 2
[initial]
kind = gaussian_bump
width = 0.1
mass = 1
[run]
t_end = 0.05
record_every = 5
[classify]
c_gn = 1.2
budget = 100
)";

}  // namespace

TEST_CASE("classify writes a report") {
  const auto dir = scratch_dir("classify");
  const auto r = cmd_classify(build_config(RawConfig::parse_string(kSmall)), dir);
  CHECK_FALSE(r.c_gn_estimated);
  CHECK(r.report.c_gn == 1.2);
  CHECK(r.u0_mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.estimate.evaluations == 100);
  const auto text = slurp(dir / "regime_report.txt");
  CHECK(text.find("regime") != std::string::npos);
  CHECK(text.find("C_GN_lower_bound") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("run writes diagnostics and verdict, deterministically") {
  const auto cfg = build_config(RawConfig::parse_string(kSmall));
  const auto a = scratch_dir("run_a");
  const auto b = scratch_dir("run_b");
  const auto sa = cmd_run(cfg, a);
  const auto sb = cmd_run(cfg, b);
  CHECK(sa.verdict == sim::Verdict::bounded);
  CHECK(exit_code(sa) == 0);
  CHECK(sa.config_hash == cfg.hash);
  const auto csv = slurp(a / "diagnostics.csv");
  CHECK(csv.rfind(std::string(diag::kCsvHeader) + "\n", 0) == 0);
  CHECK(csv == slurp(b / "diagnostics.csv"));
  const auto verdict = slurp(a / "verdict.txt");
  CHECK(verdict.rfind("bounded\n", 0) == 0);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("snapshots") {
  auto raw = RawConfig::parse_string(kSmall);
  raw.set("run.snapshot_every", "10");
  const auto cfg = build_config(raw);
  const auto dir = scratch_dir("snap");
  const auto s = cmd_run(cfg, dir);
  int count = 0;
  for (const auto& e : fs::directory_iterator(dir / "snapshots")) {
    (void)e;
    ++count;
  }
  CHECK(count >= 1);
  const auto first = read_snapshot((dir / "snapshots" / "step_00000000.txt").string());
  CHECK(first.field.grid() == cfg.grid);
  CHECK(first.t == 0.0);
  (void)s;
  fs::remove_all(dir);
}

TEST_CASE("exit codes") {
  VerdictSummary s;
  s.verdict = sim::Verdict::bounded;
  CHECK(exit_code(s) == 0);
  s.verdict = sim::Verdict::blowup;
  CHECK(exit_code(s) == 2);
  s.verdict = sim::Verdict::inconclusive;
  CHECK(exit_code(s) == 3);
}

TEST_CASE("sweep table does not depend on parallelism") {
  auto raw = RawConfig::parse_string(kSmall);
  raw.set("sweep.parameter", "initial.mass");
  raw.set("sweep.values", "0.5, 1, 2");
  const auto cfg = build_config(raw);
  const auto a = scratch_dir("sweep_a");
  const auto b = scratch_dir("sweep_b");
  const auto ra = cmd_sweep(cfg, a, 1);
  const auto rb = cmd_sweep(cfg, b, 3);
  REQUIRE(ra.size() == 3);
  CHECK(slurp(a / "phase.csv") == slurp(b / "phase.csv"));
  CHECK(slurp(a / "phase.csv").rfind(std::string(kPhaseHeader) + "\n", 0) == 0);
  for (const auto& row : ra) CHECK(row.verdict == "bounded");
  CHECK(ra[0].sweep_value == "0.5");
  CHECK(fs::exists(a / "run_002" / "verdict.txt"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("failed sweep entry does not stop the sweep") {
  auto raw = RawConfig::parse_string(kSmall);
  raw.set("sweep.parameter", "initial.mass");
  raw.set("sweep.values", "1, -1");
  const auto dir = scratch_dir("sweep_fail");
  const auto rows = cmd_sweep(build_config(raw), dir, 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].verdict == "bounded");
  CHECK(rows[1].verdict == "failed");
  fs::remove_all(dir);
}
