#pragma once

#include <optional>
#include <string>
#include <vector>

namespace chemolab::kinetics {

enum class Family { zero, logistic_power, sublog_power, sublog_loglog, tabulated };

struct Breakpoint {
  double s;
  double f;
};

/// Kinetic source f(u) of the cell equation.
///
/// Built-in families:
///   zero                 f(s) = 0
///   logistic_power       f(s) = a s - b s^theta          (theta > 1)
///   sublog_power         f(s) = a s - b s^2 / ln^gamma(s + 1)   (0 < gamma <= 1)
///   sublog_loglog        f(s) = a s - b s^2 / ln(ln(s + e))
///   tabulated            piecewise linear through (s_k, f_k), s_0 = 0,
///                        extended past the last breakpoint by its slope.
/// Every instance satisfies f(0) >= 0; construction enforces it.
class SourceSpec {
 public:
  static SourceSpec zero();
  static SourceSpec logistic_power(double a, double b, double theta);
  static SourceSpec sublog_power(double a, double b, double gamma);
  static SourceSpec sublog_loglog(double a, double b);
  static SourceSpec tabulated(std::vector<Breakpoint> table);
  /// Two-column CSV "s,f" with strictly increasing s starting at 0. Lines
  /// starting with '#' and a non-numeric header row are skipped.
  static SourceSpec load_tabulated(const std::string& csv_path);

  Family family() const noexcept { return family_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  /// theta for logistic_power, gamma for sublog_power, unused otherwise.
  double exponent() const noexcept { return exponent_; }
  const std::vector<Breakpoint>& table() const noexcept { return table_; }

  /// False for sources the boundedness theorem does not cover because
  /// their mu is zero (f = 0, logistic_power with theta < 2).
  bool theorem_applicable() const noexcept;

  /// f(s). Throws DomainError for s < 0.
  double operator()(double s) const;

  struct ValueAndSlope {
    double value;
    double slope;
  };
  /// f(s) and f'(s) (one-sided slope at table breakpoints).
  ValueAndSlope value_and_slope(double s) const;

  /// Config-file spelling, e.g. "sublog 1 1 0.5".
  std::string describe() const;

 private:
  SourceSpec(Family family, double a, double b, double exponent)
      : family_(family), a_(a), b_(b), exponent_(exponent) {}

  Family family_;
  double a_ = 0.0;
  double b_ = 0.0;
  double exponent_ = 0.0;
  std::vector<Breakpoint> table_;
};

inline double eval_f(const SourceSpec& spec, double s) { return spec(s); }

enum class Trend { increasing, decreasing, plateau };
std::string to_string(Trend trend);

struct MuOptions {
  double huge_cap = 1e12;
  /// Relative change between the last two decades below which the tail is
  /// called a plateau.
  double plateau_tol = 1e-3;
  /// Use exact limits for the built-in families.
  bool closed_form = true;
};

/// Estimate of mu = liminf_{s->inf} -f(s) ln(s) / s^2.
///
/// `value` is +inf when mu is infinite. [lower, upper] brackets the true
/// liminf as far as the sampled tail allows: a rising tail only gives a lower
/// bound, a falling tail only an upper one.
struct MuEstimate {
  double value;
  Trend trend;
  bool closed_form;
  double lower;
  double upper;

  bool infinite() const noexcept;
};

/// Exact mu for built-in families, nullopt for tabulated sources.
std::optional<double> mu_closed_form(const SourceSpec& spec);

/// Samples g(s) = -f(s) ln(s)/s^2 on a geometric grid ending at s_max and
/// reads mu off the last two decades. Requires s_max >= 1e6 s_min and
/// points_per_decade >= 8. Throws EstimationError if g is non-finite in the
/// tail or (tabulated sources) s_max lies beyond the table.
MuEstimate estimate_mu(const SourceSpec& spec, double s_min, double s_max,
                       int points_per_decade, const MuOptions& options = {});

struct SupOptions {
  /// Largest s searched for a sign change of f(s) + eta s.
  double huge_cap = 1e12;
  double rel_tol = 1e-10;
};

/// M_eta = sup{ f(s) + eta s : s > 0 }, found by a geometric scan followed by
/// golden-section refinement. Never below f(0). Throws
/// UnboundedSourceError when f(s) + eta s stays nonnegative up to huge_cap.
double compute_M_eta(const SourceSpec& spec, double eta,
                     const SupOptions& options = {});

struct MassBound {
  double M;
  double eta_star;  ///< minimiser of M_eta / eta
  double M_eta_star;
};

/// M = u0_mass + omega_area * inf_eta M_eta / eta, searched over
/// eta in [1e-6, 1e6] on a log scale.
MassBound compute_mass_bound(const SourceSpec& spec, double u0_mass,
                             double omega_area);
inline double compute_M(const SourceSpec& spec, double u0_mass,
                        double omega_area) {
  return compute_mass_bound(spec, u0_mass, omega_area).M;
}

enum class Regime { B1, B2, B3, NotCovered };
std::string to_string(Regime regime);

struct RegimeReport {
  double mu = 0.0;  ///< +inf when infinite; lower end for estimated sources
  Trend mu_trend = Trend::plateau;
  bool mu_closed_form = true;
  double M = 0.0;  ///< +inf when the source admits no finite mass bound
  double c_gn = 0.0;
  double threshold = 0.0;  ///< 1 / (2 c_gn^4)
  double gap = 0.0;        ///< threshold - (chi - mu)^+ M
  Regime regime = Regime::NotCovered;
  std::optional<double> epsilon0;
  std::string reason;  ///< why NotCovered; empty otherwise
};

/// Case analysis on already-known numbers. mu and M may be +inf.
RegimeReport classify_regime(double mu, double chi, double M, double c_gn);

/// Full analysis of a source: mu (closed form or conservative estimate), M,
/// then classify_regime. An unbounded M yields NotCovered, never an exception.
RegimeReport classify(const SourceSpec& spec, double chi, double c_gn,
                      double u0_mass, double omega_area);

}  // namespace chemolab::kinetics
