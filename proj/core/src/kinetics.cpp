#include "chemolab/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "chemolab/error.hpp"
#include "chemolab/format.hpp"
#include "golden_section.hpp"

namespace chemolab::kinetics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite_param(double x, const char* name) {
  if (!std::isfinite(x))
    throw DomainError(std::string("source parameter ") + name +
                      " must be finite");
}

void require_positive_b(double b) {
  require_finite_param(b, "b");
  if (!(b > 0.0)) throw DomainError("source parameter b must be > 0");
}

}  // namespace

SourceSpec SourceSpec::zero() { return SourceSpec(Family::zero, 0, 0, 0); }

SourceSpec SourceSpec::logistic_power(double a, double b, double theta) {
  require_finite_param(a, "a");
  require_positive_b(b);
  require_finite_param(theta, "theta");
  if (!(theta > 1.0))
    throw DomainError("logistic_power: theta must be > 1");
  return SourceSpec(Family::logistic_power, a, b, theta);
}

SourceSpec SourceSpec::sublog_power(double a, double b, double gamma) {
  require_finite_param(a, "a");
  require_positive_b(b);
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw DomainError("sublog_power: gamma must lie in (0, 1]");
  return SourceSpec(Family::sublog_power, a, b, gamma);
}

SourceSpec SourceSpec::sublog_loglog(double a, double b) {
  require_finite_param(a, "a");
  require_positive_b(b);
  return SourceSpec(Family::sublog_loglog, a, b, 0.0);
}

SourceSpec SourceSpec::tabulated(std::vector<Breakpoint> table) {
  if (table.size() < 2)
    throw DomainError("tabulated source needs at least two breakpoints");
  if (table.front().s != 0.0)
    throw DomainError("tabulated source must start at s = 0");
  for (std::size_t k = 0; k < table.size(); ++k) {
    if (!std::isfinite(table[k].s) || !std::isfinite(table[k].f))
      throw DomainError("tabulated source has a non-finite entry");
    if (k > 0 && !(table[k].s > table[k - 1].s))
      throw DomainError("tabulated source: s must be strictly increasing");
  }
  if (table.front().f < 0.0)
    throw DomainError("tabulated source violates f(0) >= 0");
  SourceSpec spec(Family::tabulated, 0, 0, 0);
  spec.table_ = std::move(table);
  return spec;
}

SourceSpec SourceSpec::load_tabulated(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open source table: " + csv_path);
  std::vector<Breakpoint> table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    std::string s_text, f_text;
    if (!(row >> s_text >> f_text))
      throw ConfigError("source table row needs two columns", line_no);
    try {
      table.push_back({parse_real(s_text), parse_real(f_text)});
    } catch (const ConfigError&) {
      if (table.empty() && line_no == 1) continue;  // header row
      throw ConfigError("bad number in source table " + csv_path, line_no);
    }
  }
  return tabulated(std::move(table));
}

bool SourceSpec::theorem_applicable() const noexcept {
  switch (family_) {
    case Family::zero:
      return false;
    case Family::logistic_power:
      return exponent_ >= 2.0;
    default:
      return true;
  }
}

SourceSpec::ValueAndSlope SourceSpec::value_and_slope(double s) const {
  if (!(s >= 0.0))
    throw DomainError("source evaluated at negative or NaN s = " +
                      format_real(s));
  switch (family_) {
    case Family::zero:
      return {0.0, 0.0};
    case Family::logistic_power: {
      if (exponent_ == 2.0) return {s * (a_ - b_ * s), a_ - 2.0 * b_ * s};
      const double p = std::pow(s, exponent_ - 1.0);
      return {a_ * s - b_ * s * p, a_ - b_ * exponent_ * p};
    }
    case Family::sublog_power: {
      const double gamma = exponent_;
      if (s == 0.0) return {0.0, gamma == 1.0 ? a_ - b_ : a_};
      const double l = std::log1p(s);
      const double lg = gamma == 1.0 ? l : std::pow(l, gamma);
      const double q = s / lg;  // s / ln^gamma(s+1)
      const double damping = s * q;
      const double d_damping = q * (2.0 - gamma * s / ((1.0 + s) * l));
      return {a_ * s - b_ * damping, a_ - b_ * d_damping};
    }
    case Family::sublog_loglog: {
      constexpr double e = std::numbers::e;
      if (s == 0.0) return {0.0, a_ - b_ * e};
      const double l1 = 1.0 + std::log1p(s / e);  // ln(s + e)
      const double ll = std::log1p(std::log1p(s / e));  // ln(ln(s + e))
      const double damping = s * s / ll;
      const double d_damping =
          2.0 * s / ll - s * s / (ll * ll * l1 * (s + e));
      return {a_ * s - b_ * damping, a_ - b_ * d_damping};
    }
    case Family::tabulated: {
      const auto& t = table_;
      auto it = std::upper_bound(
          t.begin(), t.end(), s,
          [](double x, const Breakpoint& bp) { return x < bp.s; });
      std::size_t k = static_cast<std::size_t>(it - t.begin());
      // segment [k-1, k]; past the end reuse the last segment
      if (k >= t.size()) k = t.size() - 1;
      const Breakpoint& lo = t[k - 1];
      const Breakpoint& hi = t[k];
      const double slope = (hi.f - lo.f) / (hi.s - lo.s);
      return {lo.f + slope * (s - lo.s), slope};
    }
  }
  return {0.0, 0.0};
}

double SourceSpec::operator()(double s) const { return value_and_slope(s).value; }

std::string SourceSpec::describe() const {
  switch (family_) {
    case Family::zero:
      return "zero";
    case Family::logistic_power:
      return "logistic " + format_real(a_) + " " + format_real(b_) + " " +
             format_real(exponent_);
    case Family::sublog_power:
      return "sublog " + format_real(a_) + " " + format_real(b_) + " " +
             format_real(exponent_);
    case Family::sublog_loglog:
      return "subloglog " + format_real(a_) + " " + format_real(b_);
    case Family::tabulated:
      return "tabulated (" + std::to_string(table_.size()) + " breakpoints)";
  }
  return {};
}

std::string to_string(Trend trend) {
  switch (trend) {
    case Trend::increasing:
      return "increasing";
    case Trend::decreasing:
      return "decreasing";
    case Trend::plateau:
      return "plateau";
  }
  return {};
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::B1:
      return "B1";
    case Regime::B2:
      return "B2";
    case Regime::B3:
      return "B3";
    case Regime::NotCovered:
      return "NotCovered";
  }
  return {};
}

bool MuEstimate::infinite() const noexcept { return std::isinf(value); }

std::optional<double> mu_closed_form(const SourceSpec& spec) {
  switch (spec.family()) {
    case Family::zero:
      return 0.0;
    case Family::logistic_power:
      return spec.exponent() >= 2.0 ? kInf : 0.0;
    case Family::sublog_power:
      return spec.exponent() < 1.0 ? kInf : spec.b();
    case Family::sublog_loglog:
      return kInf;
    case Family::tabulated:
      return std::nullopt;
  }
  return std::nullopt;
}

MuEstimate estimate_mu(const SourceSpec& spec, double s_min, double s_max,
                       int points_per_decade, const MuOptions& options) {
  if (!(s_min > 0.0) || !(s_max >= 1e6 * s_min))
    throw DomainError("estimate_mu: need 0 < s_min and s_max >= 1e6 * s_min");
  if (points_per_decade < 8)
    throw DomainError("estimate_mu: points_per_decade must be >= 8");
  if (options.closed_form) {
    if (auto mu = mu_closed_form(spec))
      return MuEstimate{*mu, Trend::plateau, true, *mu, *mu};
  }
  if (spec.family() == Family::tabulated && s_max > spec.table().back().s)
    throw EstimationError("estimate_mu: s_max lies beyond the source table");

  // Grid anchored at s_max so the tail decades are sampled identically for
  // every s_min.
  const double decades = std::log10(s_max / s_min);
  const int n = static_cast<int>(std::ceil(decades * points_per_decade));
  std::vector<double> s(static_cast<std::size_t>(n) + 1);
  std::vector<double> g(s.size());
  for (int k = 0; k <= n; ++k) {
    const double sk = s_max * std::pow(10.0, -double(n - k) / points_per_decade);
    s[k] = sk;
    g[k] = -spec(sk) * std::log(sk) / (sk * sk);
  }

  double tail_min = kInf, tail_max = -kInf;
  double sum_prev = 0.0, sum_last = 0.0;
  int cnt_prev = 0, cnt_last = 0;
  bool all_huge = true;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] < s_max / 100.0 * (1.0 - 1e-12)) continue;
    if (!std::isfinite(g[k]))
      throw EstimationError("estimate_mu: non-finite g(s) at s = " +
                            format_real(s[k]));
    tail_min = std::min(tail_min, g[k]);
    tail_max = std::max(tail_max, g[k]);
    if (s[k] < s_max / 10.0 * (1.0 - 1e-12)) {
      sum_prev += g[k];
      ++cnt_prev;
    } else {
      sum_last += g[k];
      ++cnt_last;
      if (!(g[k] > options.huge_cap)) all_huge = false;
    }
  }
  if (all_huge) return MuEstimate{kInf, Trend::increasing, false, kInf, kInf};

  const double mean_prev = sum_prev / cnt_prev;
  const double mean_last = sum_last / cnt_last;
  const double scale = std::max(std::abs(mean_prev), 1e-300);
  const double change = (mean_last - mean_prev) / scale;

  MuEstimate est{tail_min, Trend::plateau, false, tail_min, tail_max};
  if (change > options.plateau_tol) {
    est.trend = Trend::increasing;
    est.upper = kInf;
  } else if (change < -options.plateau_tol) {
    est.trend = Trend::decreasing;
    est.lower = 0.0;
  }
  est.lower = std::max(est.lower, 0.0);
  est.value = std::max(est.value, 0.0);
  return est;
}

double compute_M_eta(const SourceSpec& spec, double eta,
                     const SupOptions& options) {
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw DomainError("compute_M_eta: eta must be positive and finite");
  auto h = [&](double s) { return spec(s) + eta * s; };

  // Bracket: push s_hi out until f + eta s is negative at three consecutive
  // doublings.
  double s_hi = 1.0;
  while (!(h(s_hi) < 0.0 && h(2.0 * s_hi) < 0.0 && h(4.0 * s_hi) < 0.0)) {
    s_hi *= 2.0;
    if (s_hi > options.huge_cap)
      throw UnboundedSourceError(
          "sup{f(s) + eta s} unbounded: no sign change up to s = " +
          format_real(options.huge_cap) + " (eta = " + format_real(eta) +
          ", source " + spec.describe() + ")");
  }
  s_hi *= 4.0;

  constexpr int kPerDecade = 40;
  constexpr int kDecades = 12;
  constexpr int kPoints = kPerDecade * kDecades + 1;
  std::vector<double> grid(kPoints);
  int best = 0;
  double best_val = -kInf;
  for (int k = 0; k < kPoints; ++k) {
    grid[k] = s_hi * std::pow(10.0, -double(kPoints - 1 - k) / kPerDecade);
    const double val = h(grid[k]);
    if (val > best_val) {
      best_val = val;
      best = k;
    }
  }
  const double lo = best == 0 ? 0.0 : grid[best - 1];
  const double hi = best == kPoints - 1 ? grid[best] : grid[best + 1];
  const auto refined = detail::golden_section_maximize(
      h, lo, hi, options.rel_tol, 1e-300);
  return std::max({refined.value, best_val, spec(0.0)});
}

MassBound compute_mass_bound(const SourceSpec& spec, double u0_mass,
                             double omega_area) {
  if (!(u0_mass >= 0.0)) throw DomainError("compute_M: u0_mass must be >= 0");
  if (!(omega_area > 0.0))
    throw DomainError("compute_M: omega_area must be > 0");

  // phi(l) = M_eta / eta at eta = exp(l); +inf where M_eta is unbounded.
  bool any_finite = false;
  auto phi = [&](double l) {
    const double eta = std::exp(l);
    try {
      const double m = compute_M_eta(spec, eta);
      any_finite = true;
      return m / eta;
    } catch (const UnboundedSourceError&) {
      return kInf;
    }
  };

  const double l_lo = std::log(1e-6);
  const double l_hi = std::log(1e6);
  constexpr int kPoints = 12 * 8 + 1;
  std::vector<double> ls(kPoints), vals(kPoints);
  int best = 0;
  for (int k = 0; k < kPoints; ++k) {
    ls[k] = l_lo + (l_hi - l_lo) * k / (kPoints - 1);
    vals[k] = phi(ls[k]);
    if (vals[k] < vals[best]) best = k;
  }
  if (!any_finite)
    throw UnboundedSourceError(
        "no finite M_eta for eta in [1e-6, 1e6]; source " + spec.describe());

  double eta_star = std::exp(ls[best]);
  double inf_term = vals[best];
  if (std::isfinite(inf_term)) {
    const double lo = ls[std::max(best - 1, 0)];
    const double hi = ls[std::min(best + 1, kPoints - 1)];
    const auto refined = detail::golden_section_maximize(
        [&](double l) { return -phi(l); }, lo, hi, 0.0, 1e-8);
    if (-refined.value <= inf_term) {
      inf_term = -refined.value;
      eta_star = std::exp(refined.x);
    }
  }
  return MassBound{u0_mass + omega_area * inf_term, eta_star,
                   inf_term * eta_star};
}

RegimeReport classify_regime(double mu, double chi, double M, double c_gn) {
  if (!(chi > 0.0)) throw DomainError("classify: chi must be > 0");
  if (!(c_gn > 0.0)) throw DomainError("classify: c_gn must be > 0");
  if (!(mu >= 0.0)) throw DomainError("classify: mu must be >= 0");
  if (!(M >= 0.0)) throw DomainError("classify: M must be >= 0");

  RegimeReport r;
  r.mu = mu;
  r.M = M;
  r.c_gn = c_gn;
  const double c4 = c_gn * c_gn * c_gn * c_gn;
  r.threshold = 1.0 / (2.0 * c4);
  // (chi - inf)^+ = 0, and 0 * M = 0 even when M is infinite.
  const double excess = std::isinf(mu) ? 0.0 : std::max(chi - mu, 0.0);
  r.gap = excess == 0.0 ? r.threshold : r.threshold - excess * M;

  const bool mu_finite_pos = mu > 0.0 && std::isfinite(mu);
  if (std::isinf(mu)) {
    r.regime = Regime::B1;
  } else if (mu_finite_pos && mu >= chi) {
    r.regime = Regime::B2;
  } else if (mu_finite_pos && chi > mu && std::isfinite(M) && r.gap > 0.0) {
    r.regime = Regime::B3;
  } else {
    r.regime = Regime::NotCovered;
    if (std::isinf(M))
      r.reason = "M unbounded";
    else if (mu == 0.0)
      r.reason = "mu = 0";
    else
      r.reason = "(chi - mu)^+ M >= 1/(2 C_GN^4)";
  }

  if (r.regime == Regime::B2 || r.regime == Regime::B3) {
    const double margin =
        (M > 0.0 ? 1.0 / (2.0 * M * c4) : kInf) - excess;
    const double eps = 0.5 * std::min(mu, margin);
    if (eps > 0.0) r.epsilon0 = eps;
  }
  return r;
}

RegimeReport classify(const SourceSpec& spec, double chi, double c_gn,
                      double u0_mass, double omega_area) {
  MuEstimate mu{0.0, Trend::plateau, true, 0.0, 0.0};
  std::string mu_failure;
  if (spec.family() == Family::tabulated) {
    const double s_max = spec.table().back().s;
    try {
      mu = estimate_mu(spec, s_max * 1e-6, s_max, 16);
    } catch (const Error& e) {
      mu_failure = e.what();
    }
  } else {
    mu = estimate_mu(spec, 1.0, 1e12, 16);
  }

  double M = kInf;
  try {
    M = compute_M(spec, u0_mass, omega_area);
  } catch (const UnboundedSourceError&) {
  }

  // Estimated sources are classified on the conservative end of the bracket.
  RegimeReport r = classify_regime(mu.lower, chi, M, c_gn);
  r.mu_trend = mu.trend;
  r.mu_closed_form = mu.closed_form;
  if (!mu_failure.empty()) {
    r.regime = Regime::NotCovered;
    r.epsilon0.reset();
    r.reason = "mu not estimable: " + mu_failure;
  }
  return r;
}

}  // namespace chemolab::kinetics
