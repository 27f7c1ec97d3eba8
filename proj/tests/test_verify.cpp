#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "symindex/errors.hpp"
#include "symindex/rng.hpp"
#include "symindex/verify.hpp"

using namespace symindex;

namespace {

SymbolModel brownian() {
  LevyTriplet t;
  t.diffusion = {{1.0}};
  SymbolModel m;
  m.family = LevyFamily{t};
  return m;
}

SymbolModel stable(double alpha) {
  LevyTriplet t;
  t.jumps = JumpKernel{SymmetricStable{alpha, 1.0}};
  SymbolModel m;
  m.family = LevyFamily{t};
  return m;
}

}  // namespace

TEST_CASE("bound constants come out of their defining formulas") {
  BoundConstants b1 = bound_constants(1);
  CHECK(b1.c == doctest::Approx(oracles::kLemFtC).epsilon(1e-14));
  CHECK(b1.c_tilde == doctest::Approx(4.0 * oracles::kLemFtC).epsilon(1e-14));
  CHECK(b1.c_d == doctest::Approx(166.65562128235507).epsilon(1e-13));

  BoundConstants b2 = bound_constants(2);
  CHECK(b2.c == b1.c);
  CHECK(b2.c_tilde == doctest::Approx(6.0 * oracles::kLemFtC).epsilon(1e-14));
  CHECK(b2.c_d == doctest::Approx(251.98343192353261).epsilon(1e-13));

  // independent recomputation of c = 1 / (1 - e^{-1/2})
  CHECK(b1.c == doctest::Approx(1.0 / -std::expm1(-0.5)).epsilon(1e-15));
  CHECK_THROWS_AS(bound_constants(0), ValidationError);
}

TEST_CASE("wilson interval endpoints solve the score equation") {
  const double z = oracles::kZ995;
  for (double p_hat : {0.0, 0.003, 0.1, 0.5, 0.97, 1.0}) {
    for (long n : {50L, 1000L, 100000L}) {
      WilsonInterval w = wilson_interval(p_hat, n, z);
      CHECK(w.low >= 0.0);
      CHECK(w.high <= 1.0);
      CHECK(w.low <= p_hat);
      CHECK(w.high >= p_hat);
      for (double p : {w.low, w.high}) {
        const double lhs = (p_hat - p) * (p_hat - p) * double(n);
        const double rhs = z * z * p * (1.0 - p);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
      }
    }
  }

  WilsonInterval narrow = wilson_interval(0.2, 100000, z);
  WilsonInterval wide = wilson_interval(0.2, 100, z);
  CHECK(narrow.high - narrow.low < wide.high - wide.low);
}

TEST_CASE("wilson 99 percent interval covers the binomial parameter") {
  const double p = 0.3;
  const long n = 400, reps = 1500;
  PathRng rng(RngSpec{123}, 0);
  long covered = 0;
  for (long r = 0; r < reps; ++r) {
    long hits = 0;
    for (long i = 0; i < n; ++i)
      if (rng.u01() < p) ++hits;
    WilsonInterval w = wilson_interval(double(hits) / double(n), n, oracles::kZ995);
    if (w.low <= p && p <= w.high) ++covered;
  }
  CHECK(double(covered) / double(reps) > 0.975);
}

TEST_CASE("empirical symbol recovers the brownian symbol") {
  auto est = empirical_symbol(brownian(), Vec{0.0}, Vec{2.0}, Vec{0.05, 0.01}, 5.0,
                              RngSpec{42}, 20000);
  REQUIRE(est.size() == 2);
  for (const auto& e : est) {
    CHECK(e.used_paths == 20000);
    CHECK(e.warning.empty());
    CHECK(std::abs(e.value.re - 2.0) < 3.0 * e.se_re);
    CHECK(std::abs(e.value.im) < 3.0 * e.se_im);
  }
  CHECK(est[0].t == 0.05);
  CHECK(est[1].t == 0.01);
}

TEST_CASE("empirical symbol flags noise and rejects bad grids") {
  auto est = empirical_symbol(brownian(), Vec{0.0}, Vec{2.0}, Vec{1e-5}, 5.0,
                              RngSpec{42}, 200);
  CHECK(!est[0].warning.empty());

  CHECK_THROWS_AS(empirical_symbol(brownian(), Vec{0.0}, Vec{2.0}, Vec{0.01, 0.05},
                                   5.0, RngSpec{42}, 100),
                  ValidationError);
  CHECK_THROWS_AS(empirical_symbol(brownian(), Vec{0.0}, Vec{2.0}, Vec{0.01}, 0.0,
                                   RngSpec{42}, 100),
                  ValidationError);
}

TEST_CASE("upper bound check holds cell by cell") {
  Vec t_grid{0.01, 0.1};
  Vec r_grid{1.0, 2.0};
  BoundCheckReport rep = check_upper_bound(brownian(), Vec{0.0}, t_grid, r_grid,
                                           RngSpec{7}, 4000);
  CHECK(rep.all_pass);
  CHECK(rep.paths == 4000);
  CHECK(rep.excluded == 0);
  CHECK(rep.z == doctest::Approx(oracles::kZ995).epsilon(1e-12));
  REQUIRE(rep.cells.size() == 4);
  for (const auto& c : rep.cells) {
    CHECK(c.p_hat >= 0.0);
    CHECK(c.p_hat <= 1.0);
    CHECK(c.ci_low <= c.p_hat);
    CHECK(c.ci_high >= c.p_hat);
    CHECK(c.bound > 0.0);
    CHECK(c.pass);
  }
  // exceedance falls in R at fixed t (cells are t-major)
  CHECK(rep.cells[0].p_hat >= rep.cells[1].p_hat);
  CHECK(rep.cells[2].p_hat >= rep.cells[3].p_hat);
}

TEST_CASE("lower bound product is flat when the radii track the time scale") {
  Vec t_grid, r_grid;
  for (int k = 4; k <= 7; ++k) t_grid.push_back(std::pow(2.0, -k));
  for (int j = -5; j <= 0; ++j) r_grid.push_back(std::pow(2.0, j));

  SectorEstimate sector;  // brownian symbol is real
  LowerBoundReport rep = check_lower_bound(brownian(), Vec{0.0}, t_grid, r_grid,
                                           sector, RngSpec{8}, 3000);
  CHECK(!rep.inconclusive);
  CHECK(rep.flat);
  CHECK(std::abs(rep.trend_slope) <= 0.2);
  CHECK(rep.c_kappa_hat > 0.0);
  REQUIRE(rep.cells.size() == t_grid.size() * r_grid.size());
  for (const auto& c : rep.cells) {
    CHECK(c.h > 0.0);
    CHECK(c.product >= 0.0);
    CHECK(c.q_hat <= 1.0);
  }

  LowerBoundReport single = check_lower_bound(brownian(), Vec{0.0}, Vec{0.25}, r_grid,
                                              sector, RngSpec{8}, 500);
  CHECK(single.inconclusive);
  CHECK(!single.flat);
}

TEST_CASE("scaling diagnostic separates the two regimes") {
  ScalingOptions opt;
  opt.k_min = 2;
  opt.k_max = 12;
  opt.n_steps = 1024;

  ScalingReport above = scaling_diagnostic(stable(1.5), Vec{0.0}, 2.5,
                                           ScalingDirection::ToZero, RngSpec{5}, 300,
                                           opt);
  CHECK(above.verdict == "tends-to-0");
  CHECK(above.levels.size() == 11);
  CHECK(above.exploded_fraction == 0.0);
  CHECK(above.paths_per_level == 300);
  // levels are ordered toward the limit t -> 0
  CHECK(above.levels.front().t > above.levels.back().t);
  for (const auto& lv : above.levels) CHECK(lv.q90 >= lv.median);

  ScalingReport below = scaling_diagnostic(stable(1.5), Vec{0.0}, 1.0,
                                           ScalingDirection::ToZero, RngSpec{5}, 300,
                                           opt);
  CHECK(below.verdict == "tends-to-infinity");

  ScalingOptions bm_opt;
  bm_opt.k_min = 0;
  bm_opt.k_max = 6;
  bm_opt.n_steps = 256;
  ScalingReport diffusive = scaling_diagnostic(brownian(), Vec{0.0}, 1.0,
                                               ScalingDirection::ToInfinity,
                                               RngSpec{6}, 300, bm_opt);
  CHECK(diffusive.verdict == "tends-to-0");
  CHECK(diffusive.levels.front().t < diffusive.levels.back().t);
}

TEST_CASE("scaling refuses lambda on a theorem boundary and repeats exactly") {
  ScalingOptions opt;
  opt.k_min = 2;
  opt.k_max = 8;
  opt.n_steps = 256;
  opt.index_hint = 1.5;
  CHECK_THROWS_AS(scaling_diagnostic(stable(1.5), Vec{0.0}, 1.45,
                                     ScalingDirection::ToZero, RngSpec{5}, 100, opt),
                  ValidationError);

  opt.index_hint.reset();
  ScalingReport a = scaling_diagnostic(stable(1.5), Vec{0.0}, 2.5,
                                       ScalingDirection::ToZero, RngSpec{99}, 200, opt);
  ScalingReport b = scaling_diagnostic(stable(1.5), Vec{0.0}, 2.5,
                                       ScalingDirection::ToZero, RngSpec{99}, 200, opt);
  REQUIRE(a.levels.size() == b.levels.size());
  for (std::size_t i = 0; i < a.levels.size(); ++i) {
    CHECK(a.levels[i].median == b.levels[i].median);
    CHECK(a.levels[i].q90 == b.levels[i].q90);
  }
}
