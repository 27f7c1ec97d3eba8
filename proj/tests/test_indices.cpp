#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "symindex/errors.hpp"
#include "symindex/indices.hpp"
#include "symindex/symbol_model.hpp"

using namespace symindex;

namespace {

SymbolModel stable_model(double alpha) {
  LevyTriplet t;
  t.dim = 1;
  t.jumps = JumpKernel{SymmetricStable{alpha, 1.0}};
  SymbolModel m;
  m.family = LevyFamily{t};
  return m;
}

SymbolModel brownian_model() {
  LevyTriplet t;
  t.dim = 1;
  t.diffusion = {{1.0}};
  SymbolModel m;
  m.family = LevyFamily{t};
  return m;
}

}  // namespace

TEST_CASE("dyadic grids and exponent extraction") {
  Vec up = dyadic_grid_up(4);
  CHECK(up == Vec{1.0, 2.0, 4.0, 8.0, 16.0});
  Vec down = dyadic_grid_down(3);
  CHECK(down == Vec{1.0, 0.5, 0.25, 0.125});

  // v(R) = R^{-2} gives g = 2 everywhere; R = 1 is dropped
  Vec v;
  for (double r : up) v.push_back(1.0 / (r * r));
  auto [kept, g] = local_exponents(up, v);
  CHECK(kept.size() == 4);
  CHECK(kept[0] == 2.0);
  for (double gi : g) CHECK(gi == doctest::Approx(2.0).epsilon(1e-14));

  auto [mn, mx] = window_min_max(Vec{5.0, 1.0, 2.0, 4.0, 3.0}, 3);
  CHECK(mn == 2.0);
  CHECK(mx == 4.0);
}

TEST_CASE("stable process has all four origin indices at alpha") {
  const double alpha = 1.5;
  IndexReport rep = estimate_indices_origin(stable_model(alpha), dyadic_grid_up(40));
  REQUIRE(rep.beta0.has_value());
  REQUIRE(rep.delta0.has_value());
  CHECK(*rep.beta0 == doctest::Approx(alpha).epsilon(0.005));
  CHECK(*rep.beta0_lower == doctest::Approx(alpha).epsilon(0.005));
  CHECK(*rep.delta0 == doctest::Approx(alpha).epsilon(0.04));
  CHECK(*rep.delta0_upper == doctest::Approx(alpha).epsilon(0.04));
  CHECK(!rep.beta_inf.has_value());
  CHECK(!rep.domain_restricted);
  CHECK(rep.sector->satisfied);
  CHECK(rep.sector->c0 == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("stable process has all four infinity indices at alpha") {
  const double alpha = 0.5;
  IndexReport rep = estimate_indices_infinity(stable_model(alpha), Vec{0.0},
                                              dyadic_grid_down(40));
  REQUIRE(rep.beta_inf.has_value());
  REQUIRE(rep.delta_inf.has_value());
  CHECK(*rep.beta_inf == doctest::Approx(alpha).epsilon(0.02));
  CHECK(*rep.beta_inf_lower == doctest::Approx(alpha).epsilon(0.02));
  CHECK(*rep.delta_inf == doctest::Approx(alpha).epsilon(0.05));
  CHECK(*rep.delta_inf_upper == doctest::Approx(alpha).epsilon(0.05));
  CHECK(!rep.beta0.has_value());
}

TEST_CASE("brownian motion sits at two on both sides") {
  IndexReport o = estimate_indices_origin(brownian_model(), dyadic_grid_up(60));
  CHECK(*o.beta0 == doctest::Approx(2.0).epsilon(0.01));
  CHECK(*o.delta0 == doctest::Approx(2.0).epsilon(0.01));
  IndexReport i = estimate_indices_infinity(brownian_model(), Vec{0.0},
                                            dyadic_grid_down(60));
  CHECK(*i.beta_inf == doctest::Approx(2.0).epsilon(0.01));
  CHECK(*i.delta_inf == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("index pairs keep their defining order") {
  // mix of two stable components: 0.5 rules the origin, 1.5 rules infinity
  LevyTriplet t;
  t.dim = 1;
  t.jumps = JumpKernel{KernelSum{{JumpKernel{SymmetricStable{0.5, 1.0}},
                                  JumpKernel{SymmetricStable{1.5, 1.0}}}}};
  SymbolModel m;
  m.family = LevyFamily{t};

  IndexReport o = estimate_indices_origin(m, dyadic_grid_up(24));
  CHECK(*o.beta0 <= *o.beta0_lower + 1e-12);
  CHECK(*o.delta0_upper <= *o.delta0 + 1e-12);
  CHECK(*o.beta0 == doctest::Approx(0.5).epsilon(0.1));

  IndexReport i = estimate_indices_infinity(m, Vec{0.0}, dyadic_grid_down(24));
  CHECK(*i.beta_inf + 1e-12 >= *i.beta_inf_lower);
  CHECK(*i.delta_inf_upper + 1e-12 >= *i.delta_inf);
  CHECK(*i.beta_inf == doctest::Approx(1.5).epsilon(0.1));
}

TEST_CASE("stable-like family recovers both envelope ends at the origin") {
  StableLikeFamily f;
  f.alpha = [](double x) { return 0.3 + 0.4 * (1.0 + std::sin(x)) / 2.0; };
  f.alpha_min = 0.3;
  f.alpha_max = 0.7;
  SymbolModel m;
  m.family = f;
  IndexReport rep = estimate_indices_origin(m, dyadic_grid_up(48));
  CHECK(*rep.beta0 == doctest::Approx(0.3).epsilon(0.12));
  CHECK(*rep.beta0_lower == doctest::Approx(0.3).epsilon(0.12));
  CHECK(*rep.delta0 == doctest::Approx(0.7).epsilon(0.08));
  CHECK(*rep.delta0_upper == doctest::Approx(0.7).epsilon(0.08));
}

TEST_CASE("functionals match a dense grid search") {
  SdeComposedFamily f;
  LevyTriplet driver;
  driver.dim = 1;
  driver.jumps = JumpKernel{SymmetricStable{1.2, 1.0}};
  f.driver = driver;
  f.phi = [](std::span<const double> x) { return std::vector<Vec>{{x[0]}}; };
  SymbolModel m;
  m.family = f;
  const double x = 2.0, R = 0.5;
  BallOptimizerConfig cfg;
  const double H = H_local(m, Vec{x}, R, cfg);
  const double H0 = oracles::grid_H_local(m, x, R, 400, 8);
  CHECK(H == doctest::Approx(H0).epsilon(1e-3));

  SectorEstimate sector;  // symmetric driver, real symbol
  const double h = h_local(m, Vec{x}, R, sector, cfg);
  const double h0 = oracles::grid_h_local(m, x, R, sector.kappa, 400, 8);
  CHECK(h == doctest::Approx(h0).epsilon(1e-3));
}

TEST_CASE("state searches without structure need a domain") {
  SymbolModel flow = make_circle_flow_model();
  CHECK_THROWS_AS(estimate_indices_origin(flow, dyadic_grid_up(12)), ValidationError);

  Box domain{{-2.0, -2.0}, {2.0, 2.0}};
  IndexReport rep = estimate_indices_origin(flow, dyadic_grid_up(12), domain);
  CHECK(rep.domain_restricted);
  // pure drift of norm at most sqrt(2): H(R) = sqrt(2)/R
  CHECK(*rep.beta0 == doctest::Approx(1.0).epsilon(0.1));
}
