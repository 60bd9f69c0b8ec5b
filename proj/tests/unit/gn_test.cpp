#include <doctest.h>

#include <chemolab/error.hpp>
#include <chemolab/gn_estimator.hpp>
#include <chemolab/operators.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "property.hpp"

using namespace chemolab;
using namespace chemolab::gn;

TEST_CASE("instance constants") {
  static_assert(GNInstance::delta() == 0.5);
  CHECK(GNInstance::p == 4);
}

TEST_CASE("constant field ratio is |Omega|^(-1/4)") {
  CHECK(gn_ratio(ScalarField(Grid::unit_square(16), 1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  const Grid g(12, 20, 2.0, 3.0);
  CHECK(gn_ratio(ScalarField(g, 4.0)) == doctest::Approx(std::pow(6.0, -0.25)).epsilon(1e-14));
  CHECK_THROWS_AS(gn_ratio(ScalarField(g, 0.0)), DomainError);
}

TEST_CASE("property: ratio is scale invariant") {
  proptest::Rng rng(0x9e01);
  for (int trial = 0; trial < 200; ++trial) {
    const Grid g = proptest::random_grid(rng);
    const auto w = proptest::random_field(g, rng, -1.0, 1.0);
    const double c = rng.log_uniform(1e-6, 1e6);
    CHECK(gn_ratio(c * w) == doctest::Approx(gn_ratio(w)).epsilon(1e-12));
  }
}

TEST_CASE("ratio rises then saturates as a bump narrows") {
  const Grid g = Grid::unit_square(64);
  std::vector<double> r;
  for (double width = 0.4; width > 0.002; width *= 0.7)
    r.push_back(gn_ratio(BumpTrial{0.5, 0.5, width, false}.field(g)));
  // past the near-constant regime the ratio rises while the bump is resolved
  for (std::size_t k = 2; k < 9; ++k) CHECK(r[k] > r[k - 1]);
  // once narrower than a cell the field is a single spike: no further change
  CHECK(r.back() == doctest::Approx(r[r.size() - 2]).epsilon(1e-6));
}

TEST_CASE("estimate is deterministic, monotone in budget and thread independent") {
  const GNInstance inst{Grid::unit_square(24)};
  double prev = 0.0;
  for (int budget : {100, 200, 400, 800}) {
    const auto e = estimate_cgn(inst, {budget, 11, 1});
    CHECK(e.evaluations == budget);
    CHECK(e.lower_bound >= prev);
    prev = e.lower_bound;
    const auto again = estimate_cgn(inst, {budget, 11, 3});
    CHECK(again.lower_bound == e.lower_bound);
    CHECK(again.best.width == e.best.width);
  }
  // on the unit square nothing beats the constant field
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(estimate_cgn(inst, {99, 1, 1}), DomainError);
}

TEST_CASE("bumps beat the constant on a large domain") {
  const GNInstance inst{Grid(48, 48, 10.0, 10.0)};
  const auto e = estimate_cgn(inst, {400, 3, 1});
  CHECK_FALSE(e.best.constant);
  CHECK(e.lower_bound > 1.5 * std::pow(100.0, -0.25));
}

TEST_CASE("property: the estimate bounds the corpus it was computed on") {
  const GNInstance inst{Grid::unit_square(24)};
  const auto est = estimate_cgn(inst, {400, 5, 1});
  const double l4 = norm(est.best.field(inst.grid), Norm::L4);
  const auto w = est.best.field(inst.grid);
  const double l2 = norm(w, Norm::L2);
  const double grad = std::sqrt(ops::dirichlet_energy(w));
  CHECK(l4 <= est.lower_bound * (std::sqrt(grad * l2) + l2) * (1 + 1e-14));

  // Any C at or above the estimate satisfies the inequality on random bumps
  // whose ratio does not exceed it.
  proptest::Rng rng(0x9e02);
  for (int k = 0; k < 100; ++k) {
    const BumpTrial t{rng.uniform(), rng.uniform(), rng.log_uniform(0.01, 1.0), false};
    const double r = gn_ratio(t.field(inst.grid));
    const double c = std::max(r, est.lower_bound);
    const auto f = t.field(inst.grid);
    const double fl2 = norm(f, Norm::L2);
    CHECK(norm(f, Norm::L4) <=
          c * (std::sqrt(std::sqrt(ops::dirichlet_energy(f)) * fl2) + fl2) * (1 + 1e-14));
  }
}

TEST_CASE("golden estimate on a 128x128 grid") {
  std::ifstream in(std::string(CHEMOLAB_GOLDEN_DIR) + "/cgn_128.txt");
  REQUIRE(in);
  std::string line;
  int checked = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    double length = 0.0;
    std::string hex;
    fields >> length >> hex;
    std::string best;
    std::getline(fields >> std::ws, best);
    const auto e = estimate_cgn(GNInstance{Grid(128, 128, length, length)}, {10000, 20261018, 1});
    CHECK(e.lower_bound == std::strtod(hex.c_str(), nullptr));
    CHECK(e.best.describe() == best);
    ++checked;
  }
  CHECK(checked == 2);
}
