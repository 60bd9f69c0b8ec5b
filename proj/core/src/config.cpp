#include "chemolab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "chemolab/error.hpp"
#include "chemolab/format.hpp"

namespace chemolab::experiment {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"grid", {"nx", "ny", "lx", "ly"}},
      {"physics", {"tau", "chi"}},
      {"source", {"family", "a", "b", "theta", "gamma", "table"}},
      {"initial",
       {"kind", "value", "center_x", "center_y", "width", "mass", "amplitude",
        "base", "seed", "signal"}},
      {"run",
       {"t_end", "cfl", "dt_min", "dt_max", "blowup_linf_cap", "record_every",
        "snapshot_every", "scheme"}},
      {"classify", {"c_gn", "u0_mass", "budget", "c_gn_min", "c_gn_max"}},
      {"sweep", {"parameter", "values", "parallelism"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::pair<std::string, std::string> split_dotted(const std::string& key) {
  const auto dot = key.find('.');
  if (dot == std::string::npos) throw ConfigError("expected section.key, got '" + key + "'", 0, key);
  return {key.substr(0, dot), key.substr(dot + 1)};
}

void check_known(const std::string& section, const std::string& key, int line) {
  const auto it = schema().find(section);
  if (it == schema().end())
    throw ConfigError("unknown section [" + section + "]", line, section);
  if (!it->second.contains(key))
    throw ConfigError("unknown key '" + key + "' in [" + section + "]", line,
                      section + "." + key);
}

}  // namespace

RawConfig RawConfig::parse(std::istream& in) {
  RawConfig cfg;
  std::string section;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto hash = text.find_first_of("#;");
    if (hash != std::string::npos) text.erase(hash);
    text = trim(text);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3)
        throw ConfigError("malformed section header", line);
      section = trim(text.substr(1, text.size() - 2));
      if (!schema().contains(section))
        throw ConfigError("unknown section [" + section + "]", line, section);
      cfg.sections_[section];
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line);
    if (section.empty()) throw ConfigError("key outside of any section", line);
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    check_known(section, key, line);
    auto& entries = cfg.sections_[section];
    if (entries.contains(key))
      throw ConfigError("duplicate key '" + key + "'", line, section + "." + key);
    entries[key] = Entry{value, line};
  }
  return cfg;
}

RawConfig RawConfig::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

RawConfig RawConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  RawConfig cfg = parse(in);
  cfg.base_dir = std::filesystem::path(path).parent_path().string();
  return cfg;
}

bool RawConfig::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

const RawConfig::Entry* RawConfig::find(const std::string& section,
                                        const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

void RawConfig::set(const std::string& dotted_key, const std::string& value) {
  const auto [section, key] = split_dotted(dotted_key);
  check_known(section, key, 0);
  auto& entry = sections_[section][key];
  entry.value = value;
}

std::string RawConfig::canonical() const {
  std::string out;
  for (const auto& [section, entries] : sections_)
    for (const auto& [key, entry] : entries)
      out += section + "." + key + "=" + entry.value + "\n";
  return out;
}

std::uint64_t fnv1a64(const std::string& text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

// Typed access with line-aware errors.
class Reader {
 public:
  explicit Reader(const RawConfig& raw) : raw_(raw) {}

  int line(const std::string& s, const std::string& k) const {
    const auto* e = raw_.find(s, k);
    return e ? e->line : 0;
  }

  std::optional<std::string> text(const std::string& s, const std::string& k) const {
    const auto* e = raw_.find(s, k);
    if (!e) return std::nullopt;
    return e->value;
  }

  double real(const std::string& s, const std::string& k, double fallback) const {
    const auto v = text(s, k);
    if (!v) return fallback;
    try {
      return parse_real(*v);
    } catch (const ConfigError&) {
      throw ConfigError("'" + *v + "' is not a number", line(s, k), s + "." + k);
    }
  }

  std::optional<double> opt_real(const std::string& s, const std::string& k) const {
    if (!raw_.has(s, k)) return std::nullopt;
    return real(s, k, 0.0);
  }

  std::int64_t integer(const std::string& s, const std::string& k,
                       std::int64_t fallback) const {
    const auto v = text(s, k);
    if (!v) return fallback;
    std::int64_t out = 0;
    const auto* end = v->data() + v->size();
    const auto res = std::from_chars(v->data(), end, out);
    if (res.ec != std::errc() || res.ptr != end)
      throw ConfigError("'" + *v + "' is not an integer", line(s, k), s + "." + k);
    return out;
  }

  std::uint64_t unsigned_integer(const std::string& s, const std::string& k,
                                 std::uint64_t fallback) const {
    const auto v = text(s, k);
    if (!v) return fallback;
    std::uint64_t out = 0;
    const auto* end = v->data() + v->size();
    const auto res = std::from_chars(v->data(), end, out);
    if (res.ec != std::errc() || res.ptr != end)
      throw ConfigError("'" + *v + "' is not a nonnegative integer", line(s, k),
                        s + "." + k);
    return out;
  }

  [[noreturn]] void fail(const std::string& s, const std::string& k,
                         const std::string& what) const {
    throw ConfigError(s + "." + k + ": " + what, line(s, k), s + "." + k);
  }

  void require(bool ok, const std::string& s, const std::string& k,
               const std::string& what) const {
    if (!ok) fail(s, k, what);
  }

 private:
  const RawConfig& raw_;
};

int checked_int(const Reader& r, const std::string& s, const std::string& k,
                int fallback, int lo) {
  const std::int64_t v = r.integer(s, k, fallback);
  r.require(v >= lo && v <= 1'000'000'000, s, k,
            "must be >= " + std::to_string(lo));
  return static_cast<int>(v);
}

// `family` is either a bare family name with parameters in their own keys
// (family = sublog_power, a = 1, ...) or the inline spelling
// "logistic a b theta", "sublog a b gamma", "subloglog a b", "tabulated <path>".
kinetics::SourceSpec read_source(const Reader& r, const std::string& base_dir) {
  using kinetics::SourceSpec;
  std::istringstream tokens(r.text("source", "family").value_or("zero"));
  std::string family;
  tokens >> family;
  std::vector<std::string> inline_args;
  for (std::string t; tokens >> t;) inline_args.push_back(t);

  auto arg = [&](std::size_t k, const char* key, double fallback) {
    if (k < inline_args.size()) {
      try {
        return parse_real(inline_args[k]);
      } catch (const ConfigError&) {
        r.fail("source", "family", "'" + inline_args[k] + "' is not a number");
      }
    }
    return r.real("source", key, fallback);
  };
  auto expect_args = [&](std::size_t n) {
    if (!inline_args.empty() && inline_args.size() != n)
      r.fail("source", "family",
             family + " takes " + std::to_string(n) + " inline parameters");
  };

  try {
    if (family == "zero") {
      expect_args(0);
      return SourceSpec::zero();
    }
    if (family == "logistic" || family == "logistic_power") {
      expect_args(3);
      return SourceSpec::logistic_power(arg(0, "a", 1.0), arg(1, "b", 1.0),
                                        arg(2, "theta", 2.0));
    }
    if (family == "sublog" || family == "sublog_power") {
      expect_args(3);
      return SourceSpec::sublog_power(arg(0, "a", 1.0), arg(1, "b", 1.0),
                                      arg(2, "gamma", 0.5));
    }
    if (family == "subloglog" || family == "sublog_loglog") {
      expect_args(2);
      return SourceSpec::sublog_loglog(arg(0, "a", 1.0), arg(1, "b", 1.0));
    }
    if (family == "tabulated") {
      expect_args(inline_args.empty() ? 0 : 1);
      const auto table =
          inline_args.empty() ? r.text("source", "table") : inline_args.front();
      r.require(table.has_value(), "source", "family", "tabulated needs a table path");
      std::filesystem::path p(*table);
      if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
      return SourceSpec::load_tabulated(p.string());
    }
  } catch (const DomainError& e) {
    r.fail("source", "family", e.what());
  }
  r.fail("source", "family",
         "unknown family '" + family +
             "' (zero, logistic, sublog, subloglog, tabulated)");
}

sim::InitialKind read_initial(const Reader& r, const Grid& grid,
                              std::uint64_t seed) {
  const std::string kind = r.text("initial", "kind").value_or("constant");
  if (kind == "constant") {
    const double value = r.real("initial", "value", 1.0);
    r.require(value > 0.0 && std::isfinite(value), "initial", "value", "must be > 0");
    return sim::ConstantInit{value};
  }
  if (kind == "gaussian_bump") {
    sim::GaussianBumpInit b{};
    b.center_x = r.real("initial", "center_x", 0.5 * grid.lx());
    b.center_y = r.real("initial", "center_y", 0.5 * grid.ly());
    b.width = r.real("initial", "width", 0.1 * std::min(grid.lx(), grid.ly()));
    b.mass = r.real("initial", "mass", 1.0);
    r.require(b.width > 0.0 && std::isfinite(b.width), "initial", "width", "must be > 0");
    r.require(b.mass > 0.0 && std::isfinite(b.mass), "initial", "mass", "must be > 0");
    r.require(b.center_x >= 0.0 && b.center_x <= grid.lx(), "initial", "center_x",
              "must lie in [0, lx]");
    r.require(b.center_y >= 0.0 && b.center_y <= grid.ly(), "initial", "center_y",
              "must lie in [0, ly]");
    return b;
  }
  if (kind == "random_perturbation") {
    sim::RandomPerturbationInit p{};
    p.seed = seed;
    p.base = r.real("initial", "base", 1.0);
    p.amplitude = r.real("initial", "amplitude", 0.1);
    r.require(p.base > 0.0 && std::isfinite(p.base), "initial", "base", "must be > 0");
    r.require(p.amplitude >= 0.0 && p.amplitude < p.base, "initial", "amplitude",
              "need 0 <= amplitude < base");
    return p;
  }
  r.fail("initial", "kind",
         "unknown kind '" + kind + "' (constant, gaussian_bump, random_perturbation)");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

sim::StepperOptions ExperimentConfig::stepper_options() const {
  sim::StepperOptions o;
  o.tau = tau;
  o.chi = chi;
  o.cfl = run.cfl;
  o.dt_min = run.dt_min;
  o.dt_max = run.dt_max;
  o.blowup_linf_cap = run.blowup_linf_cap;
  o.t_end = run.t_end;
  o.source = source;
  o.scheme = run.scheme;
  return o;
}

ExperimentConfig build_config(const RawConfig& raw) {
  const Reader r(raw);
  ExperimentConfig c;

  const int nx = checked_int(r, "grid", "nx", 64, 4);
  const int ny = checked_int(r, "grid", "ny", nx, 4);
  const double lx = r.real("grid", "lx", 1.0);
  const double ly = r.real("grid", "ly", lx);
  r.require(lx > 0.0 && std::isfinite(lx), "grid", "lx", "must be > 0");
  r.require(ly > 0.0 && std::isfinite(ly), "grid", "ly", "must be > 0");
  c.grid = Grid(nx, ny, lx, ly);

  c.tau = r.real("physics", "tau", 0.0);
  c.chi = r.real("physics", "chi", 1.0);
  r.require(c.tau >= 0.0 && std::isfinite(c.tau), "physics", "tau", "must be >= 0");
  r.require(c.chi > 0.0 && std::isfinite(c.chi), "physics", "chi", "must be > 0");

  c.source = read_source(r, raw.base_dir);
  c.seed = r.unsigned_integer("initial", "seed", 0);
  c.initial = read_initial(r, c.grid, c.seed);
  const std::string signal = r.text("initial", "signal").value_or("elliptic");
  if (signal == "elliptic")
    c.signal = sim::InitialSignal::elliptic;
  else if (signal == "zero")
    c.signal = sim::InitialSignal::zero;
  else
    r.fail("initial", "signal", "expected elliptic or zero");
  r.require(c.signal == sim::InitialSignal::elliptic || c.tau > 0.0, "initial",
            "signal", "zero initial signal needs tau > 0");

  RunBlock& run = c.run;
  run.t_end = r.real("run", "t_end", run.t_end);
  run.cfl = r.real("run", "cfl", run.cfl);
  run.dt_min = r.real("run", "dt_min", run.dt_min);
  run.dt_max = r.real("run", "dt_max", run.dt_max);
  run.blowup_linf_cap = r.real("run", "blowup_linf_cap", run.blowup_linf_cap);
  run.record_every = checked_int(r, "run", "record_every", run.record_every, 1);
  run.snapshot_every = checked_int(r, "run", "snapshot_every", run.snapshot_every, 0);
  r.require(run.t_end >= 0.0 && std::isfinite(run.t_end), "run", "t_end", "must be >= 0");
  r.require(run.cfl > 0.0 && run.cfl < 1.0, "run", "cfl", "must lie in (0, 1)");
  r.require(run.dt_min > 0.0, "run", "dt_min", "must be > 0");
  r.require(run.dt_max >= run.dt_min && std::isfinite(run.dt_max), "run", "dt_max",
            "must be finite and >= dt_min");
  r.require(run.blowup_linf_cap > 0.0, "run", "blowup_linf_cap", "must be > 0");
  const std::string scheme = r.text("run", "scheme").value_or("upwind");
  if (scheme == "upwind")
    run.scheme = ops::FluxScheme::upwind;
  else if (scheme == "central")
    run.scheme = ops::FluxScheme::central;
  else
    r.fail("run", "scheme", "expected upwind or central");

  ClassifyBlock& cl = c.classify;
  const std::string cgn = r.text("classify", "c_gn").value_or("estimate");
  if (cgn != "estimate") {
    cl.c_gn = r.real("classify", "c_gn", 0.0);
    r.require(*cl.c_gn > 0.0 && std::isfinite(*cl.c_gn), "classify", "c_gn",
              "must be > 0 or 'estimate'");
  }
  cl.u0_mass = r.opt_real("classify", "u0_mass");
  if (cl.u0_mass)
    r.require(*cl.u0_mass >= 0.0 && std::isfinite(*cl.u0_mass), "classify",
              "u0_mass", "must be >= 0");
  cl.budget = checked_int(r, "classify", "budget", cl.budget, 100);
  cl.c_gn_min = r.opt_real("classify", "c_gn_min");
  cl.c_gn_max = r.opt_real("classify", "c_gn_max");
  r.require(cl.c_gn_min.has_value() == cl.c_gn_max.has_value(), "classify",
            cl.c_gn_min ? "c_gn_min" : "c_gn_max",
            "c_gn_min and c_gn_max go together");
  if (cl.c_gn_min)
    r.require(*cl.c_gn_min > 0.0 && *cl.c_gn_min <= *cl.c_gn_max, "classify",
              "c_gn_min", "need 0 < c_gn_min <= c_gn_max");

  if (raw.has("sweep", "parameter") || raw.has("sweep", "values")) {
    SweepBlock sw;
    sw.parameter = r.text("sweep", "parameter").value_or("");
    r.require(!sw.parameter.empty(), "sweep", "parameter", "missing sweep parameter");
    const auto dot = sw.parameter.find('.');
    const std::string section =
        dot == std::string::npos ? sw.parameter : sw.parameter.substr(0, dot);
    const std::string key = dot == std::string::npos ? "" : sw.parameter.substr(dot + 1);
    const auto it = schema().find(section);
    r.require(it != schema().end() && section != "sweep" && it->second.contains(key),
              "sweep", "parameter", "unknown parameter '" + sw.parameter + "'");
    sw.values = split_list(r.text("sweep", "values").value_or(""));
    sw.parallelism = checked_int(r, "sweep", "parallelism", 1, 1);
    c.sweep = std::move(sw);
  }

  c.raw = raw;
  c.hash = fnv1a64(raw.canonical());
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  return build_config(RawConfig::load(path));
}

}  // namespace chemolab::experiment
