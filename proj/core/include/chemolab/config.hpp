#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chemolab/grid.hpp"
#include "chemolab/integrator.hpp"
#include "chemolab/kinetics.hpp"

namespace chemolab::experiment {

/// Raw `key = value` entries grouped by `[section]`, with source lines.
///
///   # comment            ; comment
///   [grid]
///   nx = 64
class RawConfig {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  /// Throws ConfigError on syntax errors, unknown sections or keys, and
  /// duplicate keys.
  static RawConfig parse(std::istream& in);
  static RawConfig parse_string(const std::string& text);
  /// Throws IoError if the file cannot be read.
  static RawConfig load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  const Entry* find(const std::string& section, const std::string& key) const;
  /// Dotted key "section.key"; adds the entry if absent. Throws ConfigError
  /// for unknown keys.
  void set(const std::string& dotted_key, const std::string& value);

  /// Sorted "section.key=value" lines; the input of the config hash.
  std::string canonical() const;

  /// Directory that relative paths (tabulated source tables) resolve against.
  std::string base_dir;

 private:
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& text) noexcept;

struct RunBlock {
  double t_end = 1.0;
  double cfl = 0.4;
  double dt_min = 1e-12;
  double dt_max = 1e-3;
  double blowup_linf_cap = 1e8;
  int record_every = 10;
  int snapshot_every = 0;  ///< 0 disables snapshots
  ops::FluxScheme scheme = ops::FluxScheme::upwind;
};

struct ClassifyBlock {
  std::optional<double> c_gn;  ///< nullopt: use the estimator's lower bound
  std::optional<double> u0_mass;
  int budget = 2000;
  /// Optional C_GN interval reported alongside the main verdict.
  std::optional<double> c_gn_min;
  std::optional<double> c_gn_max;
};

struct SweepBlock {
  std::string parameter;  ///< dotted key, e.g. "initial.mass"
  std::vector<std::string> values;
  int parallelism = 1;
};

struct ExperimentConfig {
  Grid grid = Grid::unit_square(64);
  double tau = 0.0;
  double chi = 1.0;
  kinetics::SourceSpec source = kinetics::SourceSpec::zero();
  sim::InitialKind initial = sim::ConstantInit{1.0};
  sim::InitialSignal signal = sim::InitialSignal::elliptic;
  std::uint64_t seed = 0;
  RunBlock run;
  ClassifyBlock classify;
  std::optional<SweepBlock> sweep;

  RawConfig raw;
  std::uint64_t hash = 0;

  sim::StepperOptions stepper_options() const;
};

/// Validates every block against the module preconditions. Errors carry the
/// line of the offending key.
ExperimentConfig build_config(const RawConfig& raw);
ExperimentConfig load_config(const std::string& path);

}  // namespace chemolab::experiment
