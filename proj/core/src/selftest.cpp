#include "symindex/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "symindex/cogarch.hpp"
#include "symindex/functionals.hpp"
#include "symindex/indices.hpp"
#include "symindex/levy_triplet.hpp"
#include "symindex/parallel.hpp"
#include "symindex/paths.hpp"
#include "symindex/rng.hpp"
#include "symindex/sampling.hpp"
#include "symindex/symbol_model.hpp"
#include "symindex/verify.hpp"

namespace symindex {
namespace {

struct Ctx {
  std::ostream& out;
  int failures = 0;
};

template <class F>
void run(Ctx& c, const char* name, F body) {
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  if (ok) {
    c.out << "ok   " << name << "\n";
  } else {
    c.out << "FAIL " << name;
    if (!detail.empty()) c.out << " (" << detail << ")";
    c.out << "\n";
    ++c.failures;
  }
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

LevyTriplet stable_triplet(double alpha) {
  LevyTriplet t;
  t.dim = 1;
  t.jumps = JumpKernel{SymmetricStable{alpha, 1.0}};
  return t;
}

SymbolModel stable_model(double alpha) {
  SymbolModel m;
  m.family = LevyFamily{stable_triplet(alpha)};
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

int run_selftest(std::ostream& out) {
  Ctx c{out};

  run(c, "symbol stable closed form", [](std::string& d) {
    SymbolValue v = levy_symbol(stable_triplet(1.5), std::vector<double>{2.0}, {});
    const double want = std::pow(2.0, 1.5);
    d = "re " + num(v.re) + " want " + num(want);
    return std::abs(v.re - want) < 1e-7 && std::abs(v.im) < 1e-9;
  });

  run(c, "symbol brownian with drift", [](std::string& d) {
    LevyTriplet t;
    t.dim = 1;
    t.drift = {0.5};
    t.diffusion = {{1.0}};
    SymbolValue v = levy_symbol(t, std::vector<double>{3.0}, {});
    d = "re " + num(v.re) + " im " + num(v.im);
    return std::abs(v.re - 4.5) < 1e-12 && std::abs(v.im + 1.5) < 1e-12;
  });

  run(c, "symbol variance gamma closed form", [](std::string& d) {
    LevyTriplet t;
    t.dim = 1;
    t.jumps = JumpKernel{VarianceGamma{1.0}};
    SymbolValue v = levy_symbol(t, std::vector<double>{1.0}, {});
    const double want = std::log(3.0);
    d = "re " + num(v.re) + " want " + num(want);
    return std::abs(v.re - want) < 1e-6 && std::abs(v.im) < 1e-9;
  });

  run(c, "independent sum is additive", [](std::string& d) {
    SumIndependentFamily f;
    f.components.push_back(std::make_shared<SymbolModel>(brownian_model()));
    f.components.push_back(std::make_shared<SymbolModel>(stable_model(0.7)));
    SymbolModel m;
    m.family = f;
    PathRng rng(RngSpec{11}, 0);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const Vec x = {rng.normal(), rng.normal()};
      const Vec xi = {rng.normal(), rng.normal()};
      SymbolValue whole = eval_symbol(m, x, xi);
      SymbolValue a = eval_symbol(*f.components[0], {x.data(), 1}, {xi.data(), 1});
      SymbolValue b =
          eval_symbol(*f.components[1], {x.data() + 1, 1}, {xi.data() + 1, 1});
      worst = std::max(worst, std::abs(whole.re - a.re - b.re) +
                                  std::abs(whole.im - a.im - b.im));
    }
    d = "worst gap " + num(worst);
    return worst < 1e-10;
  });

  run(c, "upper functional of the Cauchy process", [](std::string& d) {
    GlobalValue H = H_global(stable_model(1.0), 2.0);
    d = "H(2) " + num(H.value) + " want 0.5";
    return std::abs(H.value - 0.5) < 1e-6 && !H.domain_restricted;
  });

  run(c, "lower functional of Brownian motion", [](std::string& d) {
    SectorEstimate sector;  // c0 = 0, kappa = 1/(2 pi)
    GlobalValue h = h_global(brownian_model(), 2.0, sector);
    const double want = std::numbers::pi * std::numbers::pi / 32.0;
    d = "h(2) " + num(h.value) + " want " + num(want);
    return std::abs(h.value - want) < 1e-6;
  });

  run(c, "index recovery for the 1.5-stable process", [](std::string& d) {
    IndexReport rep = estimate_indices_origin(stable_model(1.5), dyadic_grid_up(40));
    if (!rep.beta0 || !rep.beta0_lower || !rep.delta0 || !rep.delta0_upper) {
      d = "missing estimates";
      return false;
    }
    d = "beta0 " + num(*rep.beta0) + " delta0 " + num(*rep.delta0);
    return std::abs(*rep.beta0 - 1.5) < 0.01 && std::abs(*rep.beta0_lower - 1.5) < 0.01 &&
           std::abs(*rep.delta0 - 1.5) < 0.06 && std::abs(*rep.delta0_upper - 1.5) < 0.06;
  });

  run(c, "stable increment characteristic function", [](std::string& d) {
    IncrementSampler sampler(stable_triplet(1.5));
    PathRng rng(RngSpec{202}, 0);
    const double dt = 0.1;
    const long n = 20000;
    double mc = 0.0, ms = 0.0;
    Vec dx(1);
    for (long i = 0; i < n; ++i) {
      sampler.sample(dt, rng, dx);
      mc += std::cos(dx[0]);
      ms += std::sin(dx[0]);
    }
    mc /= double(n);
    ms /= double(n);
    const double want = std::exp(-dt);  // E cos(xi X_dt) at xi = 1
    d = "ecf " + num(mc) + " want " + num(want);
    return std::abs(mc - want) < 0.02 && std::abs(ms) < 0.02;
  });

  run(c, "deterministic circle flow witnesses", [](std::string& d) {
    const double pi = std::numbers::pi;
    Vec a = deterministic_example(std::vector<double>{0.0, 2.0}, pi);
    Vec b = deterministic_example(std::vector<double>{0.0, 2.0}, 2 * pi);
    Vec e = deterministic_example(std::vector<double>{7.0, 7.0}, 123.4);
    const double g1 = std::hypot(a[0], a[1]);
    const double g2 = std::hypot(b[0], b[1] + 2.0);
    d = "gaps " + num(g1) + " " + num(g2);
    return g1 <= 1e-12 && g2 <= 1e-12 && e[0] == 7.0 && e[1] == 7.0;
  });

  run(c, "cogarch symbol consistency", [](std::string& d) {
    CogarchParams p;
    p.beta = 1.0;
    p.lambda = 0.05;
    p.delta = 0.95;
    LevyTriplet driver;
    driver.dim = 1;
    driver.diffusion = {{1.0}};
    p.driver = driver;
    CogarchEvaluator ev(p);
    const Vec xi = {0.7, -0.4};
    SymbolValue fast = CogarchEvaluator::eval(ev.prepare(0.3), xi);
    SymbolValue direct = cogarch_symbol(p, 0.0, 0.3, xi);
    const double gap = std::abs(fast.re - direct.re) + std::abs(fast.im - direct.im);
    d = "gap " + num(gap);
    return gap < 1e-6 && fast.re > -1e-9;
  });

  run(c, "rng reproducibility and thread stability", [](std::string& d) {
    PathRng r1(RngSpec{7}, 3);
    PathRng r2(RngSpec{7}, 3);
    for (int i = 0; i < 50; ++i)
      if (r1.normal() != r2.normal()) {
        d = "substream diverged at draw " + std::to_string(i);
        return false;
      }
    const std::size_t n = 1000;
    std::vector<double> serial(n), threaded(n);
    for (std::size_t i = 0; i < n; ++i) {
      PathRng r(RngSpec{99}, i);
      serial[i] = r.normal() + r.exponential();
    }
    set_max_threads(4);
    parallel_for(n, [&threaded](std::size_t i) {
      PathRng r(RngSpec{99}, i);
      threaded[i] = r.normal() + r.exponential();
    });
    set_max_threads(1);
    d = "";
    return serial == threaded;
  });

  run(c, "tail bound constants and Wilson interval", [](std::string& d) {
    BoundConstants bc = bound_constants(1);
    const double c1 = 1.0 / (1.0 - std::exp(-0.5));
    WilsonInterval w = wilson_interval(0.05, 1000, 2.5758293035489004);
    d = "c " + num(bc.c) + " c_d " + num(bc.c_d);
    return std::abs(bc.c - c1) < 1e-14 && std::abs(bc.c_tilde - 4 * c1) < 1e-12 &&
           std::abs(bc.c_d - (4.0 + 64.0 * c1)) < 1e-12 && w.low > 0.0 &&
           w.low < 0.05 && w.high > 0.05 && w.high < 1.0;
  });

  run(c, "simulation is seed deterministic", [](std::string& d) {
    LevyTriplet driver;
    driver.dim = 1;
    driver.diffusion = {{1.0}};
    driver.jumps = JumpKernel{SymmetricStable{1.2, 0.5}};
    auto phi = [](std::span<const double> x) {
      return std::vector<Vec>{{1.0 + 0.1 * x[0]}};
    };
    PathGrid grid{1.0, 64};
    PathEnsemble a = simulate_sde(phi, driver, std::vector<double>{0.5}, grid,
                                  RngSpec{31}, 16);
    PathEnsemble b = simulate_sde(phi, driver, std::vector<double>{0.5}, grid,
                                  RngSpec{31}, 16);
    d = "";
    return a.path_states == b.path_states && a.path_max == b.path_max &&
           a.exploded == b.exploded;
  });

  out << (c.failures == 0 ? "selftest passed" : "selftest FAILED") << " ("
      << c.failures << " failures)\n";
  return c.failures;
}

}  // namespace symindex
