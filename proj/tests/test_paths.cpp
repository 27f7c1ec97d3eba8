#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "symindex/errors.hpp"
#include "symindex/parallel.hpp"
#include "symindex/paths.hpp"
#include "symindex/sampling.hpp"
#include "symindex/symbol_model.hpp"

using namespace symindex;

namespace {

// ECF of M sampled increments against exp(-dt p(xi)); 4 standard errors of margin
void ecf_against_symbol(const LevyTriplet& t, const std::vector<Vec>& xis, double dt,
                        long m_paths, std::uint64_t seed) {
  IncrementSampler sampler(t);
  SymbolModel model;
  model.family = LevyFamily{t};
  const Vec x0(t.dim, 0.0);

  for (std::size_t j = 0; j < xis.size(); ++j) {
    const Vec& xi = xis[j];
    PathRng rng(RngSpec{seed}, j);
    std::complex<double> acc = 0.0;
    Vec inc(t.dim);
    for (long i = 0; i < m_paths; ++i) {
      sampler.sample(dt, rng, inc);
      double phase = 0.0;
      for (int k = 0; k < t.dim; ++k) phase += inc[k] * xi[k];
      acc += std::complex<double>(std::cos(phase), std::sin(phase));
    }
    acc /= double(m_paths);

    const SymbolValue p = eval_symbol(model, x0, xi);
    const std::complex<double> want = std::exp(-dt * std::complex<double>(p.re, p.im));
    const double se = 4.0 / std::sqrt(double(m_paths));
    CHECK(std::abs(acc.real() - want.real()) < se);
    CHECK(std::abs(acc.imag() - want.imag()) < se);
  }
}

}  // namespace

TEST_CASE("sampled increments reproduce the symbol through their ECF") {
  std::vector<Vec> xis{{0.7}, {2.0}, {-3.5}};

  SUBCASE("symmetric stable") {
    LevyTriplet t;
    t.jumps = JumpKernel{SymmetricStable{0.8, 1.0}};
    ecf_against_symbol(t, xis, 0.2, 30000, 11);
  }
  SUBCASE("stable with drift and diffusion") {
    LevyTriplet t;
    t.drift = {0.3};
    t.diffusion = {{0.25}};
    t.jumps = JumpKernel{SymmetricStable{1.5, 0.7}};
    ecf_against_symbol(t, xis, 0.2, 30000, 12);
  }
  SUBCASE("variance gamma") {
    LevyTriplet t;
    t.jumps = JumpKernel{VarianceGamma{2.0}};
    ecf_against_symbol(t, xis, 0.2, 30000, 13);
  }
  SUBCASE("compound poisson, asymmetric normal jumps") {
    CompoundPoisson cp;
    cp.intensity = 2.0;
    cp.jump_density = [](double y) {
      return std::exp(-0.5 * (y - 0.5) * (y - 0.5)) / std::sqrt(2.0 * M_PI);
    };
    cp.draw = [](PathRng& r) { return 0.5 + r.normal(); };
    LevyTriplet t;
    t.jumps = JumpKernel{cp};
    ecf_against_symbol(t, xis, 0.2, 30000, 14);
  }
  SUBCASE("compound poisson, uniform jumps straddling the cutoff") {
    CompoundPoisson cp;
    cp.jump_density = [](double y) { return (y >= -0.5 && y <= 1.5) ? 0.5 : 0.0; };
    cp.draw = [](PathRng& r) { return -0.5 + 2.0 * r.u01(); };
    cp.breakpoints = {0.5, 1.5};
    LevyTriplet t;
    t.jumps = JumpKernel{cp};
    ecf_against_symbol(t, xis, 0.2, 30000, 15);
  }
  SUBCASE("compound poisson, two sided exponential jumps") {
    CompoundPoisson cp;
    cp.intensity = 1.5;
    cp.jump_density = [](double y) { return 1.5 * std::exp(-3.0 * std::abs(y)); };
    cp.draw = [](PathRng& r) {
      const double mag = r.exponential() / 3.0;
      return r.u01() < 0.5 ? -mag : mag;
    };
    cp.symmetric = true;
    LevyTriplet t;
    t.jumps = JumpKernel{cp};
    ecf_against_symbol(t, xis, 0.2, 30000, 16);
  }
}

TEST_CASE("multivariate samplers reproduce the symbol") {
  std::vector<Vec> xis{{1.0, 0.0}, {0.6, 0.8}, {-1.0, 2.0}};

  SUBCASE("isotropic stable in the plane") {
    LevyTriplet t;
    t.dim = 2;
    t.jumps = JumpKernel{SymmetricStable{1.2, 1.0}};
    ecf_against_symbol(t, xis, 0.2, 30000, 21);
  }
  SUBCASE("mapped scalar kernel") {
    LevyTriplet t;
    t.dim = 2;
    MappedKernel mk;
    mk.a = {1.0, -1.0};
    mk.base = std::make_shared<JumpKernel>(JumpKernel{VarianceGamma{0.5}});
    t.jumps = JumpKernel{mk};
    ecf_against_symbol(t, xis, 0.2, 30000, 22);
  }
}

TEST_CASE("stable increments scale like dt^{1/alpha}") {
  const double alpha = 1.5;
  LevyTriplet t;
  t.jumps = JumpKernel{SymmetricStable{alpha, 1.0}};
  IncrementSampler sampler(t);

  const long m = 2000;
  Vec a(m), b(m), inc(1);
  PathRng ra(RngSpec{77}, 0), rb(RngSpec{77}, 1);
  for (long i = 0; i < m; ++i) {
    sampler.sample(0.01, ra, inc);
    a[i] = inc[0] / std::pow(0.01, 1.0 / alpha);
    sampler.sample(1.0, rb, inc);
    b[i] = inc[0];
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  // two-sample Kolmogorov-Smirnov distance
  double d = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] <= b[ib])
      ++ia;
    else
      ++ib;
    d = std::max(d, std::abs(double(ia) / m - double(ib) / m));
  }
  CHECK(d < 1.95 * std::sqrt(2.0 / m));  // asymptotic 0.1% critical value
}

TEST_CASE("euler walk applies the coefficient at the left endpoint") {
  // run the driver alone, then rebuild the Phi(x) = x walk from its increments
  LevyTriplet driver;
  driver.drift = {0.1};
  driver.diffusion = {{1.0}};
  PathGrid grid{1.0, 64};
  RngSpec rng{314};
  const long m = 32;

  PhiFn identity = [](std::span<const double>) { return std::vector<Vec>{{1.0}}; };
  PathEnsemble z = simulate_sde(identity, driver, Vec{0.0}, grid, rng, m, {}, true);

  PhiFn linear = [](std::span<const double> x) { return std::vector<Vec>{{x[0]}}; };
  PathEnsemble x = simulate_sde(linear, driver, Vec{2.0}, grid, rng, m);

  REQUIRE(z.times.size() == std::size_t(grid.n_steps + 1));
  for (long p = 0; p < m; ++p) {
    double state = 2.0;
    for (long k = 0; k < grid.n_steps; ++k) {
      const double dz = z.path_states[p][k + 1] - z.path_states[p][k];
      state += state * dz;
      CHECK(x.path_states[p][k + 1] == doctest::Approx(state).epsilon(1e-13));
    }
  }
}

TEST_CASE("euler moments of the linear equation match the exact recursion") {
  // X_{k+1} = X_k (1 + dB): E X_n = x0 and E X_n^2 = x0^2 (1 + dt)^n exactly
  LevyTriplet driver;
  driver.diffusion = {{1.0}};
  PathGrid grid{1.0, 64};
  const long m = 50000;
  PhiFn linear = [](std::span<const double> x) { return std::vector<Vec>{{x[0]}}; };
  PathEnsemble e = simulate_sde(linear, driver, Vec{1.0}, grid, RngSpec{2718}, m,
                                Vec{1.0});

  REQUIRE(e.times.size() == 2);  // t = 0 kept always, plus the requested time
  double mean = 0.0, mean2 = 0.0;
  for (long p = 0; p < m; ++p) {
    const double xT = e.path_states[p][1];
    mean += xT;
    mean2 += xT * xT;
  }
  mean /= double(m);
  mean2 /= double(m);
  const double want2 = std::pow(1.0 + grid.dt(), double(grid.n_steps));
  CHECK(mean == doctest::Approx(1.0).epsilon(0.02));
  CHECK(mean2 == doctest::Approx(want2).epsilon(0.08));
}

TEST_CASE("cogarch volatility follows the ODE when jumps carry no weight") {
  CogarchParams p;
  p.beta = 2.0;
  p.lambda = 0.0;
  p.delta = 0.5;
  p.driver.diffusion = {{1.0}};

  PathGrid grid{1.0, 20000};
  PathEnsemble e = simulate_cogarch(p, 0.0, 1.0, grid, RngSpec{9}, 2, Vec{0.5, 1.0});

  const double ld = std::log(p.delta);
  auto closed = [&](double t) {
    return (1.0 + p.beta / ld) * std::exp(ld * t) - p.beta / ld;  // s^2(t)
  };
  for (long path = 0; path < 2; ++path) {
    for (std::size_t k = 1; k < e.times.size(); ++k) {
      const double v = e.state_at(path, k)[1];
      CHECK(std::exp(v) == doctest::Approx(closed(e.times[k])).epsilon(5e-4));
    }
  }

  PathGrid coarse{10.0, 4};  // dt = 2.5 >= 1/|log delta|, volatility could go negative
  CHECK_THROWS_AS(simulate_cogarch(p, 0.0, 1.0, coarse, RngSpec{9}, 1), ValidationError);
}

TEST_CASE("cogarch price integrates the volatility") {
  CogarchParams p;
  p.beta = 1.0;
  p.lambda = 0.05;
  p.delta = 0.95;
  p.driver.diffusion = {{1.0}};

  const long m = 20000;
  PathGrid grid{0.5, 128};
  PathEnsemble e = simulate_cogarch(p, 0.0, 1.0, grid, RngSpec{31}, m, Vec{0.5});

  // G_t = int S dB is a centered martingale
  double mean = 0.0;
  for (long path = 0; path < m; ++path) mean += e.state_at(path, 1)[0];
  mean /= double(m);
  CHECK(std::abs(mean) < 0.05);
}

TEST_CASE("the two-circle flow is exact, periodic and frozen off the circles") {
  const Vec top{0.0, 2.0};
  Vec x = deterministic_example(top, M_PI);
  CHECK(std::abs(x[0]) < 1e-12);
  CHECK(std::abs(x[1]) < 1e-12);
  x = deterministic_example(top, 2.0 * M_PI);
  CHECK(std::abs(x[0]) < 1e-12);
  CHECK(std::abs(x[1] + 2.0) < 1e-12);
  x = deterministic_example(Vec{0.0, -2.0}, 2.0 * M_PI);
  CHECK(std::abs(x[1] - 2.0) < 1e-12);

  // full period 4 pi from a generic point of the upper circle
  const Vec gen{std::sin(1.0), 1.0 - std::cos(1.0)};
  x = deterministic_example(gen, 4.0 * M_PI);
  CHECK(x[0] == doctest::Approx(gen[0]).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(gen[1]).epsilon(1e-12));

  const Vec off{3.0, 3.0};
  x = deterministic_example(off, 17.3);
  CHECK(x == off);

  CHECK_THROWS_AS(deterministic_example(Vec{1.0}, 1.0), ValidationError);
}

TEST_CASE("explosions are flagged and excluded from the running maximum") {
  LevyTriplet driver;
  driver.drift = {1e200};
  PhiFn square = [](std::span<const double> x) {
    return std::vector<Vec>{{x[0] * x[0]}};
  };
  PathGrid grid{1.0, 4};
  PathEnsemble e = simulate_sde(square, driver, Vec{1.0}, grid, RngSpec{1}, 3);

  CHECK(e.exploded.size() == 3);
  Vec mx = max_process(e, 1.0);
  for (double v : mx) CHECK(std::isnan(v));
  CHECK_THROWS_AS(max_process(e, 2.0), ValidationError);
}

TEST_CASE("running maxima are monotone and keep_times snap to grid nodes") {
  LevyTriplet driver;
  driver.jumps = JumpKernel{SymmetricStable{1.5, 1.0}};
  PhiFn identity = [](std::span<const double>) { return std::vector<Vec>{{1.0}}; };
  PathGrid grid{1.0, 10};

  PathEnsemble full = simulate_sde(identity, driver, Vec{0.0}, grid, RngSpec{202}, 5,
                                   {}, true);
  PathEnsemble sub = simulate_sde(identity, driver, Vec{0.0}, grid, RngSpec{202}, 5,
                                  Vec{0.49, 1.0}, true);

  CHECK(sub.times == Vec{0.0, 0.5, 1.0});
  for (long p = 0; p < 5; ++p) {
    CHECK(sub.path_states[p][1] == full.path_states[p][5]);
    CHECK(sub.path_states[p][2] == full.path_states[p][10]);
    CHECK(sub.path_max[p][1] == full.path_max[p][5]);
    for (std::size_t k = 1; k < full.times.size(); ++k)
      CHECK(full.path_max[p][k] >= full.path_max[p][k - 1]);
  }

  Vec m_half = max_process(full, 0.5);
  Vec m_one = max_process(full, 1.0);
  for (long p = 0; p < 5; ++p) CHECK(m_one[p] >= m_half[p]);
}

TEST_CASE("model simulator matches the assembled walk and rejects what it cannot run") {
  LevyTriplet t;
  t.drift = {0.2};
  t.jumps = JumpKernel{VarianceGamma{1.0}};
  SymbolModel m;
  m.family = LevyFamily{t};

  PathGrid grid{1.0, 32};
  ModelSimulator sim(m, Vec{0.0});
  PathEnsemble a = sim.ensemble(grid, RngSpec{5}, 8);

  PhiFn identity = [](std::span<const double>) { return std::vector<Vec>{{1.0}}; };
  PathEnsemble b = simulate_sde(identity, t, Vec{0.0}, grid, RngSpec{5}, 8, {}, true);
  CHECK(a.path_states == b.path_states);
  CHECK(a.path_max == b.path_max);

  CHECK_THROWS_AS(ModelSimulator(make_circle_flow_model(), Vec{0.0, 2.0}),
                  ValidationError);
}

TEST_CASE("ensembles are bit-identical across thread counts") {
  LevyTriplet t;
  t.diffusion = {{1.0}};
  t.jumps = JumpKernel{SymmetricStable{0.9, 0.5}};
  PhiFn linear = [](std::span<const double> x) {
    return std::vector<Vec>{{1.0 + x[0] * x[0]}};
  };
  PathGrid grid{1.0, 64};

  PathEnsemble one = simulate_sde(linear, t, Vec{0.3}, grid, RngSpec{404}, 40);
  set_max_threads(3);
  PathEnsemble three = simulate_sde(linear, t, Vec{0.3}, grid, RngSpec{404}, 40);
  set_max_threads(1);

  CHECK(one.path_states == three.path_states);
  CHECK(one.path_max == three.path_max);
  CHECK(one.exploded == three.exploded);
}
