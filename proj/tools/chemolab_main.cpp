// chemolab: classify sources, run simulations, sweep parameters and estimate
// the Gagliardo-Nirenberg constant from an INI-style experiment config.
//
// Exit codes: 0 ok / bounded, 1 usage or config error, 2 blowup,
// 3 failed or inconclusive run, 4 I/O error.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "chemolab/error.hpp"
#include "chemolab/experiment.hpp"
#include "chemolab/format.hpp"

namespace {

namespace ex = chemolab::experiment;

constexpr int kUsage = 1;
constexpr int kIo = 4;

ex::ExperimentConfig load(const std::string& path,
                          const std::optional<std::uint64_t>& seed) {
  ex::RawConfig raw = ex::RawConfig::load(path);
  if (seed) raw.set("initial.seed", std::to_string(*seed));
  return ex::build_config(raw);
}

std::string default_out() {
  const char* env = std::getenv("CHEMOLAB_OUT");
  return env && *env ? env : "chemolab_out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keller-Segel chemotaxis lab with kinetic source"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = default_out();
  std::optional<std::uint64_t> seed;
  int parallel = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--seed", seed, "override [initial] seed");
  };

  auto* classify = app.add_subcommand("classify", "regime of the configured source");
  add_common(classify);
  classify->add_option("--out", out_dir, "output directory (default $CHEMOLAB_OUT)");

  auto* run = app.add_subcommand("run", "simulate to t_end and write diagnostics");
  add_common(run);
  run->add_option("--out", out_dir, "output directory (default $CHEMOLAB_OUT)");

  auto* sweep = app.add_subcommand("sweep", "one run per [sweep] value, writes phase.csv");
  add_common(sweep);
  sweep->add_option("--out", out_dir, "output directory (default $CHEMOLAB_OUT)");
  sweep->add_option("--parallel", parallel, "concurrent runs (overrides config)")
      ->check(CLI::PositiveNumber);

  auto* cgn = app.add_subcommand("estimate-cgn", "lower bound for C_GN on the grid");
  add_common(cgn);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    const ex::ExperimentConfig config = load(config_path, seed);
    if (*classify) {
      const auto result = ex::cmd_classify(config, out_dir);
      ex::write_regime_report(std::cout, result);
      return 0;
    }
    if (*run) {
      const auto summary = ex::cmd_run(config, out_dir);
      ex::write_verdict(std::cout, summary);
      return ex::exit_code(summary);
    }
    if (*sweep) {
      const auto rows = ex::cmd_sweep(config, out_dir, parallel);
      ex::write_phase_csv(std::cout, rows);
      return 0;
    }
    if (*cgn) {
      const auto est = ex::cmd_estimate_cgn(config);
      std::cout << "lower_bound: " << chemolab::format_real(est.lower_bound) << '\n'
                << "best_trial: " << est.best.describe() << '\n'
                << "evaluations: " << est.evaluations << '\n';
      return 0;
    }
  } catch (const chemolab::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return kUsage;
  } catch (const chemolab::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return kUsage;
}
