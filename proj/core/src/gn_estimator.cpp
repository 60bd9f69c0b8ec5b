#include "chemolab/gn_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "chemolab/error.hpp"
#include "chemolab/format.hpp"
#include "chemolab/integrator.hpp"
#include "chemolab/operators.hpp"

namespace chemolab::gn {

double gn_ratio(const ScalarField& w) {
  require_finite(w, "gn_ratio");
  const double l2 = norm(w, Norm::L2);
  if (l2 == 0.0) throw DomainError("gn_ratio: field is identically zero");
  const double l4 = norm(w, Norm::L4);
  const double grad = std::sqrt(ops::dirichlet_energy(w));
  return l4 / (std::sqrt(grad * l2) + l2);
}

ScalarField BumpTrial::field(const Grid& grid) const {
  if (constant) return ScalarField(grid, 1.0);
  const double inv = 1.0 / (2.0 * width * width);
  return ScalarField::from_function(grid, [&](double x, double y) {
    const double dx = x - center_x;
    const double dy = y - center_y;
    return std::exp(-(dx * dx + dy * dy) * inv);
  });
}

std::string BumpTrial::describe() const {
  if (constant) return "constant";
  return "bump center_x=" + format_real(center_x) +
         " center_y=" + format_real(center_y) + " width=" + format_real(width);
}

namespace {

constexpr int kBlock = 64;
constexpr int kRandomPerBlock = 48;

bool is_random_trial(int k) { return k > 0 && (k - 1) % kBlock < kRandomPerBlock; }

struct Limits {
  double w_min;
  double w_max;
  double lx;
  double ly;
};

BumpTrial random_trial(const Limits& lim, std::uint64_t seed, int k) {
  // Independent sub-stream per trial index.
  std::uint64_t state = seed ^ (0x632be59bd9b4e019ULL * static_cast<std::uint64_t>(k + 1));
  sim::splitmix64(state);
  BumpTrial t;
  t.center_x = lim.lx * sim::unit_uniform(sim::splitmix64(state));
  t.center_y = lim.ly * sim::unit_uniform(sim::splitmix64(state));
  const double lw = std::log(lim.w_min) +
                    (std::log(lim.w_max) - std::log(lim.w_min)) *
                        sim::unit_uniform(sim::splitmix64(state));
  t.width = std::exp(lw);
  return t;
}

// Coordinate ascent state: the move cycles over (coordinate, sign) pairs and
// halves the step sizes after a full cycle without improvement.
struct Ascent {
  double step[3];
  int move = 0;
  int failures = 0;

  BumpTrial propose(const BumpTrial& best, const Limits& lim) const {
    BumpTrial t = best;
    t.constant = false;
    const int coord = move / 2;
    const double sign = move % 2 == 0 ? 1.0 : -1.0;
    if (coord == 0) t.center_x = std::clamp(t.center_x + sign * step[0], 0.0, lim.lx);
    if (coord == 1) t.center_y = std::clamp(t.center_y + sign * step[1], 0.0, lim.ly);
    if (coord == 2)
      t.width = std::clamp(t.width * std::exp(sign * step[2]), lim.w_min, lim.w_max);
    return t;
  }

  void report(bool improved) {
    if (improved) {
      failures = 0;
      return;
    }
    move = (move + 1) % 6;
    if (++failures == 6) {
      for (double& s : step) s *= 0.5;
      failures = 0;
    }
  }
};

}  // namespace

CgnEstimate estimate_cgn(const GNInstance& instance, const EstimateOptions& options) {
  if (options.budget < 100) throw DomainError("estimate_cgn: budget must be >= 100");
  const Grid& grid = instance.grid;
  const Limits lim{0.25 * std::min(grid.hx(), grid.hy()),
                   std::max(grid.lx(), grid.ly()), grid.lx(), grid.ly()};

  CgnEstimate est;
  est.best.constant = true;
  est.lower_bound = gn_ratio(est.best.field(grid));
  est.evaluations = 1;

  Ascent ascent{{0.1 * lim.lx, 0.1 * lim.ly, 0.5}};
  const int threads = std::max(1, options.threads);

  int k = 1;
  while (k < options.budget) {
    if (is_random_trial(k)) {
      // Evaluate the run of consecutive random trials, possibly in parallel,
      // then reduce in index order.
      int end = k;
      while (end < options.budget && is_random_trial(end)) ++end;
      const int count = end - k;
      std::vector<BumpTrial> trials(count);
      std::vector<double> ratios(count);
      auto work = [&](int lo, int hi) {
        for (int m = lo; m < hi; ++m) {
          trials[m] = random_trial(lim, options.seed, k + m);
          ratios[m] = gn_ratio(trials[m].field(grid));
        }
      };
      if (threads == 1 || count < 2 * threads) {
        work(0, count);
      } else {
        std::vector<std::jthread> pool;
        const int chunk = (count + threads - 1) / threads;
        for (int lo = 0; lo < count; lo += chunk)
          pool.emplace_back(work, lo, std::min(count, lo + chunk));
      }
      for (int m = 0; m < count; ++m) {
        if (ratios[m] > est.lower_bound) {
          est.lower_bound = ratios[m];
          est.best = trials[m];
        }
      }
      est.evaluations += count;
      k = end;
      continue;
    }
    BumpTrial start = est.best;
    if (start.constant) {
      start.constant = false;
      start.center_x = 0.5 * lim.lx;
      start.center_y = 0.5 * lim.ly;
      start.width = lim.w_max;
    }
    const BumpTrial cand = ascent.propose(start, lim);
    const double r = gn_ratio(cand.field(grid));
    const bool improved = r > est.lower_bound;
    if (improved) {
      est.lower_bound = r;
      est.best = cand;
    }
    ascent.report(improved);
    ++est.evaluations;
    ++k;
  }
  return est;
}

}  // namespace chemolab::gn
