#include <cmath>
#include <complex>

#include "doctest.h"
#include "oracles.hpp"
#include "symindex/errors.hpp"
#include "symindex/levy_triplet.hpp"
#include "symindex/rng.hpp"
#include "symindex/symbol_model.hpp"

using namespace symindex;

namespace {

SymbolModel levy_model(LevyTriplet t) {
  SymbolModel m;
  m.family = LevyFamily{std::move(t)};
  return m;
}

SymbolModel stable_model(double alpha, double scale = 1.0) {
  LevyTriplet t;
  t.dim = 1;
  t.jumps = JumpKernel{SymmetricStable{alpha, scale}};
  return levy_model(std::move(t));
}

}  // namespace

TEST_CASE("gaussian symbol with drift is exact") {
  LevyTriplet t;
  t.dim = 2;
  t.drift = {0.5, -1.0};
  t.diffusion = {{2.0, 0.5}, {0.5, 1.0}};
  const Vec xi = {1.0, 3.0};
  SymbolValue v = levy_symbol(t, xi);
  // -i ell'xi + xi'Q xi / 2
  const double re = 0.5 * (2.0 * 1.0 + 2.0 * 0.5 * 3.0 + 1.0 * 9.0);
  const double im = -(0.5 * 1.0 - 1.0 * 3.0);
  CHECK(v.re == doctest::Approx(re).epsilon(1e-14));
  CHECK(v.im == doctest::Approx(im).epsilon(1e-14));
}

TEST_CASE("compound poisson symbol matches the oracle") {
  const double lam = 2.0, mean = 0.5, sd = 1.0;
  CompoundPoisson cp;
  cp.intensity = lam;
  const double norm = 1.0 / (sd * std::sqrt(2.0 * M_PI));
  cp.jump_density = [mean, sd, norm](double y) {
    const double u = (y - mean) / sd;
    return norm * std::exp(-0.5 * u * u);
  };
  cp.symmetric = false;
  LevyTriplet t;
  t.dim = 1;
  t.jumps = JumpKernel{cp};
  const double xi = 1.7;
  SymbolValue v = levy_symbol(t, std::vector<double>{xi});
  Cplx o = -oracles::lk_integral([&](double y) { return lam * cp.jump_density(y); },
                                 xi, 1.0, 1e-9, 12.0, 400000);
  CHECK(v.re == doctest::Approx(o.real()).epsilon(1e-6));
  CHECK(v.im == doctest::Approx(o.imag()).epsilon(1e-6));
}

TEST_CASE("mapped kernel is the pullback of its base") {
  MappedKernel mk;
  mk.a = {1.0, -2.0};
  mk.base = std::make_shared<JumpKernel>(JumpKernel{VarianceGamma{0.5}});
  LevyTriplet t;
  t.dim = 2;
  t.jumps = JumpKernel{mk};
  for (double x1 : {0.3, 2.0}) {
    const Vec xi = {x1, 0.7};
    const double u = mk.a[0] * xi[0] + mk.a[1] * xi[1];
    SymbolValue v = levy_symbol(t, xi);
    CHECK(v.re == doctest::Approx(0.5 * std::log1p(u * u)).epsilon(1e-7));
    CHECK(std::abs(v.im) < 1e-9);
  }
}

TEST_CASE("stable-like family exposes the state-dependent index") {
  StableLikeFamily f;
  f.alpha = [](double x) { return 0.3 + 0.4 * (1.0 + std::sin(x)) / 2.0; };
  f.alpha_min = 0.3;
  f.alpha_max = 0.7;
  SymbolModel m;
  m.family = f;
  for (double x : {0.0, 1.0, -2.5}) {
    const double a = f.alpha(x);
    SymbolValue v = eval_symbol(m, std::vector<double>{x}, std::vector<double>{3.0});
    CHECK(v.re == doctest::Approx(std::pow(3.0, a)).epsilon(1e-7));
    CHECK(std::abs(v.im) < 1e-9);
  }
}

TEST_CASE("sde composition evaluates the driver at the mapped argument") {
  SdeComposedFamily f;
  LevyTriplet driver;
  driver.dim = 1;
  driver.jumps = JumpKernel{SymmetricStable{1.2, 1.0}};
  f.driver = driver;
  f.phi = [](std::span<const double> x) { return std::vector<Vec>{{x[0]}}; };
  SymbolModel m;
  m.family = f;
  for (double x : {0.5, 2.0, -3.0}) {
    SymbolValue v = eval_symbol(m, std::vector<double>{x}, std::vector<double>{1.0});
    CHECK(v.re == doctest::Approx(std::pow(std::abs(x), 1.2)).epsilon(1e-6));
  }
}

TEST_CASE("independent components add exactly") {
  SumIndependentFamily f;
  LevyTriplet bm;
  bm.dim = 1;
  bm.diffusion = {{1.0}};
  bm.drift = {0.3};
  f.components.push_back(std::make_shared<SymbolModel>(levy_model(bm)));
  f.components.push_back(std::make_shared<SymbolModel>(stable_model(0.7)));
  SymbolModel m;
  m.family = f;
  PathRng rng(RngSpec{400}, 0);
  for (int i = 0; i < 100; ++i) {
    const Vec x = {rng.normal(), rng.normal()};
    const Vec xi = {3.0 * rng.normal(), 3.0 * rng.normal()};
    SymbolValue whole = sum_symbol(f, x, xi);
    SymbolValue a = eval_symbol(*f.components[0], {x.data(), 1}, {xi.data(), 1});
    SymbolValue b =
        eval_symbol(*f.components[1], {x.data() + 1, 1}, {xi.data() + 1, 1});
    CHECK(whole.re == doctest::Approx(a.re + b.re).epsilon(1e-13));
    CHECK(whole.im == doctest::Approx(a.im + b.im).epsilon(1e-13));
    SymbolValue direct = eval_symbol(m, x, xi);
    CHECK(direct.re == whole.re);
    CHECK(direct.im == whole.im);
  }
}

TEST_CASE("negative definite function invariants") {
  LevyTriplet t;
  t.dim = 1;
  t.drift = {0.2};
  t.diffusion = {{0.5}};
  CompoundPoisson cp;
  cp.intensity = 1.0;
  cp.jump_density = [](double y) { return (y >= 0.5 && y <= 1.5) ? 1.0 : 0.0; };
  cp.breakpoints = {0.5, 1.5};
  t.jumps = JumpKernel{KernelSum{{JumpKernel{SymmetricStable{1.1, 1.0}}, JumpKernel{cp}}}};
  SymbolModel m = levy_model(t);

  SymbolValue zero = eval_symbol(m, Vec{0.0}, Vec{0.0});
  CHECK(zero.re == 0.0);
  CHECK(zero.im == 0.0);

  PathRng rng(RngSpec{77}, 0);
  for (int i = 0; i < 50; ++i) {
    const Vec xi = {5.0 * rng.normal()};
    const Vec nxi = {-xi[0]};
    SymbolValue a = eval_symbol(m, Vec{0.0}, xi);
    SymbolValue b = eval_symbol(m, Vec{0.0}, nxi);
    CHECK(a.re == doctest::Approx(b.re).epsilon(1e-10));   // Hermitian
    CHECK(a.im == doctest::Approx(-b.im).epsilon(1e-10));
    CHECK(a.re > -1e-8);                                   // Re p >= 0 up to tolerance
  }
}

TEST_CASE("circle flow symbol is the pure drift") {
  SymbolModel flow = make_circle_flow_model();
  // drift (1 - x2, x1) on the circle through the origin
  SymbolValue v = eval_symbol(flow, Vec{0.0, 0.0}, Vec{1.5, -0.7});
  CHECK(v.re == 0.0);
  CHECK(v.im == doctest::Approx(-1.5).epsilon(1e-12));
  // top of that circle: drift (1 - 2, 0) = (-1, 0)
  SymbolValue w = eval_symbol(flow, Vec{0.0, 2.0}, Vec{1.5, -0.7});
  CHECK(w.im == doctest::Approx(1.5).epsilon(1e-12));
  // off both circles the state is absorbing
  SymbolValue z = eval_symbol(flow, Vec{5.0, 5.0}, Vec{1.5, -0.7});
  CHECK(z.re == 0.0);
  CHECK(z.im == 0.0);
}

TEST_CASE("state dependency masks") {
  CHECK(is_state_free(stable_model(1.5)));
  StableLikeFamily f;
  f.alpha = [](double) { return 0.5; };
  SymbolModel sl;
  sl.family = f;
  CHECK(!is_state_free(sl));
  CHECK(state_dependency_mask(sl) == std::vector<bool>{true});
}

TEST_CASE("model validation rejects inconsistent shapes") {
  LevyTriplet t;
  t.dim = 2;
  t.diffusion = {{1.0}};  // 1x1 block for a 2-dimensional process
  CHECK_THROWS_AS(validate_model(levy_model(t)), ValidationError);
}

TEST_CASE("differential characteristics reproduce the symbol") {
  SdeComposedFamily f;
  LevyTriplet driver;
  driver.dim = 1;
  driver.drift = {0.4};
  driver.diffusion = {{1.0}};
  driver.jumps = JumpKernel{SymmetricStable{1.2, 1.0}};
  f.driver = driver;
  f.phi = [](std::span<const double> x) { return std::vector<Vec>{{x[0]}}; };
  SymbolModel m;
  m.family = f;
  const Vec x = {1.7};
  LevyTriplet at_x = differential_characteristics(m, x);
  const Vec xi = {0.9};
  SymbolValue direct = eval_symbol(m, x, xi);
  SymbolValue rebuilt = levy_symbol(at_x, xi);
  CHECK(rebuilt.re == doctest::Approx(direct.re).epsilon(1e-7));
  CHECK(rebuilt.im == doctest::Approx(direct.im).epsilon(1e-7));
}
