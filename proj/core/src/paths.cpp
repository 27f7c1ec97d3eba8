#include "symindex/paths.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <variant>

#include "symindex/errors.hpp"
#include "symindex/parallel.hpp"

namespace symindex {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_rows(const std::vector<Vec>& rows, int d, int n) {
  if (int(rows.size()) != d)
    throw ValidationError("Phi must return one row per state coordinate");
  for (const Vec& r : rows)
    if (int(r.size()) != n)
      throw ValidationError("Phi rows must have the driver dimension");
}

// Grid step indices to record: the requested times snapped to the nearest node, plus
// the start node. Ascending and unique.
std::vector<long> keep_steps(const PathGrid& grid, std::span<const double> keep_times) {
  std::vector<long> ks;
  if (keep_times.empty()) {
    ks.resize(std::size_t(grid.n_steps) + 1);
    for (long k = 0; k <= grid.n_steps; ++k) ks[std::size_t(k)] = k;
    return ks;
  }
  ks.push_back(0);
  for (double t : keep_times) {
    if (!std::isfinite(t) || t < 0.0 || t > grid.horizon * (1.0 + 1e-12))
      throw ValidationError("requested record time lies outside the grid horizon");
    ks.push_back(std::clamp<long>(long(std::llround(t / grid.dt())), 0, grid.n_steps));
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

// Shared ensemble driver: walker(path, rng, observe) must call observe at grid nodes
// in time order (starting at node 0) and return false when the path exploded.
template <class Walker>
PathEnsemble run_ensemble(int dim, const Vec& x0, const PathGrid& grid,
                          std::span<const double> keep_times, const RngSpec& rng,
                          long n_paths, Walker&& walker) {
  if (n_paths < 1) throw ValidationError("need at least one path");
  const std::vector<long> keep = keep_steps(grid, keep_times);
  PathEnsemble e;
  e.dim = dim;
  e.horizon = grid.horizon;
  e.x0 = x0;
  e.rng = rng;
  e.times.resize(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) e.times[i] = grid.time_at(keep[i]);
  e.path_states.assign(std::size_t(n_paths), {});
  e.path_max.assign(std::size_t(n_paths), {});
  std::vector<char> bad(std::size_t(n_paths), 0);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  parallel_for(std::size_t(n_paths), [&](std::size_t p) {
    PathRng prng(rng, std::uint64_t(p));
    Vec& st = e.path_states[p];
    Vec& mx = e.path_max[p];
    st.assign(keep.size() * std::size_t(dim), nan);
    mx.assign(keep.size(), nan);
    std::size_t pos = 0;
    double rmax = 0.0;
    auto observe = [&](long k, double, std::span<const double> x) {
      double d2 = 0.0;
      for (int i = 0; i < dim; ++i) {
        const double u = x[std::size_t(i)] - x0[std::size_t(i)];
        d2 += u * u;
      }
      rmax = std::max(rmax, std::sqrt(d2));
      if (pos < keep.size() && keep[pos] == k) {
        std::copy(x.begin(), x.end(), st.begin() + long(pos) * dim);
        mx[pos] = rmax;
        ++pos;
      }
      return true;
    };
    if (!walker(p, prng, observe)) bad[p] = 1;
  });
  for (long p = 0; p < n_paths; ++p)
    if (bad[std::size_t(p)]) e.exploded.push_back(p);
  return e;
}

void check_cogarch_step(double dt, double ld) {
  if (!(dt < 1.0 / std::abs(ld)))
    throw ValidationError(
        "COGARCH step size too coarse: the volatility recursion needs dt < 1/|log "
        "delta|");
}

// The volatility recursion on (G, S^2), observed through (G, log S^2).
bool cogarch_walk(double beta, double ld, double lod, const IncrementSampler& sampler,
                  double g0, double s20, const PathGrid& grid, PathRng& rng,
                  const std::function<bool(long, double, std::span<const double>)>&
                      observe) {
  const double dt = grid.dt();
  double g = g0;
  double s2 = s20;
  Vec state = {g0, std::log(s20)};
  if (!observe(0L, 0.0, std::span<const double>(state))) return true;
  Vec dz;
  for (long k = 0; k < grid.n_steps; ++k) {
    sampler.sample(dt, rng, dz);
    const double z = dz[0];
    g += std::sqrt(s2) * z;
    s2 += (beta + s2 * ld) * dt + s2 * lod * z * z;
    if (!std::isfinite(g) || !std::isfinite(s2) || !(s2 > 0.0)) return false;
    state[0] = g;
    state[1] = std::log(s2);
    if (!observe(k + 1, grid.time_at(k + 1), std::span<const double>(state)))
      return true;
  }
  return true;
}

}  // namespace

double PathGrid::time_at(long k) const {
  return k >= n_steps ? horizon : horizon * (double(k) / double(n_steps));
}

void PathGrid::validate() const {
  if (!std::isfinite(horizon) || horizon <= 0.0)
    throw ValidationError("path grid horizon must be positive");
  if (n_steps < 1) throw ValidationError("path grid needs at least one step");
}

std::span<const double> PathEnsemble::state_at(std::size_t path,
                                               std::size_t t_index) const {
  return {path_states[path].data() + t_index * std::size_t(dim), std::size_t(dim)};
}

bool walk_sde_path(const PhiFn& phi, bool phi_constant, const IncrementSampler& driver,
                   std::span<const double> x0, const PathGrid& grid, PathRng& rng,
                   const std::function<bool(long, double, std::span<const double>)>&
                       observe) {
  grid.validate();
  const int d = int(x0.size());
  if (d < 1) throw ValidationError("empty start state");
  const int n = driver.dim();
  Vec x(x0.begin(), x0.end());
  if (!observe(0, 0.0, x)) return true;
  std::vector<Vec> rows = phi(x);
  check_rows(rows, d, n);
  Vec dz;
  const double dt = grid.dt();
  for (long k = 0; k < grid.n_steps; ++k) {
    if (!phi_constant && k > 0) {
      rows = phi(x);
      check_rows(rows, d, n);
    }
    driver.sample(dt, rng, dz);
    for (int i = 0; i < d; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += rows[std::size_t(i)][std::size_t(j)] * dz[std::size_t(j)];
      x[std::size_t(i)] += s;
    }
    for (int i = 0; i < d; ++i)
      if (!std::isfinite(x[std::size_t(i)])) return false;
    if (!observe(k + 1, grid.time_at(k + 1), x)) return true;
  }
  return true;
}

PathEnsemble simulate_sde(const PhiFn& phi, const LevyTriplet& driver,
                          std::span<const double> x0, const PathGrid& grid,
                          const RngSpec& rng, long n_paths,
                          std::span<const double> keep_times, bool phi_constant) {
  grid.validate();
  if (!phi) throw ValidationError("Phi is required");
  if (x0.empty()) throw ValidationError("empty start state");
  IncrementSampler sampler(driver);
  const Vec start(x0.begin(), x0.end());
  return run_ensemble(int(start.size()), start, grid, keep_times, rng, n_paths,
                      [&](std::size_t, PathRng& prng, auto&& observe) {
                        return walk_sde_path(phi, phi_constant, sampler, start, grid,
                                             prng, observe);
                      });
}

PathEnsemble simulate_cogarch(const CogarchParams& params, double g0, double s0,
                              const PathGrid& grid, const RngSpec& rng, long n_paths,
                              std::span<const double> keep_times) {
  grid.validate();
  validate_cogarch(params);
  if (!(s0 > 0.0)) throw ValidationError("COGARCH start volatility must be positive");
  const double ld = std::log(params.delta);
  const double lod = params.lambda / params.delta;
  check_cogarch_step(grid.dt(), ld);
  IncrementSampler sampler(params.driver);
  const double beta = params.beta;
  const Vec start = {g0, 2.0 * std::log(s0)};
  return run_ensemble(2, start, grid, keep_times, rng, n_paths,
                      [&](std::size_t, PathRng& prng, auto&& observe) {
                        return cogarch_walk(beta, ld, lod, sampler, g0, s0 * s0, grid,
                                            prng, observe);
                      });
}

ModelSimulator::ModelSimulator(const SymbolModel& m, std::span<const double> x0)
    : x0_(x0.begin(), x0.end()) {
  validate_model(m);
  if (int(x0_.size()) != model_dim(m))
    throw ValidationError("start state does not match the model dimension");
  if (const auto* lv = std::get_if<LevyFamily>(&m.family)) {
    sampler_ = std::make_shared<IncrementSampler>(lv->triplet);
    const int d = model_dim(m);
    std::vector<Vec> eye(std::size_t(d), Vec(std::size_t(d), 0.0));
    for (int i = 0; i < d; ++i) eye[std::size_t(i)][std::size_t(i)] = 1.0;
    phi_ = [eye](std::span<const double>) { return eye; };
    phi_constant_ = true;
    return;
  }
  if (const auto* sde = std::get_if<SdeComposedFamily>(&m.family)) {
    sampler_ = std::make_shared<IncrementSampler>(sde->driver);
    phi_ = sde->phi;
    phi_constant_ = sde->state_free;
    return;
  }
  if (const auto* cg = std::get_if<CogarchFamily>(&m.family)) {
    const CogarchParams& p = cg->evaluator->params();
    sampler_ = std::make_shared<IncrementSampler>(p.driver);
    cogarch_ = true;
    cog_beta_ = p.beta;
    cog_ld_ = std::log(p.delta);
    cog_lod_ = p.lambda / p.delta;
    return;
  }
  throw ValidationError(
      "this model has no simulation recipe; only Levy, SDE-composed and COGARCH "
      "models are simulable");
}

bool ModelSimulator::walk(const PathGrid& grid, PathRng& rng,
                          const std::function<bool(long, double,
                                                   std::span<const double>)>& observe)
    const {
  if (cogarch_) {
    grid.validate();
    check_cogarch_step(grid.dt(), cog_ld_);
    return cogarch_walk(cog_beta_, cog_ld_, cog_lod_, *sampler_, x0_[0],
                        std::exp(x0_[1]), grid, rng, observe);
  }
  return walk_sde_path(phi_, phi_constant_, *sampler_, x0_, grid, rng, observe);
}

PathEnsemble ModelSimulator::ensemble(const PathGrid& grid, const RngSpec& rng,
                                      long n_paths,
                                      std::span<const double> keep_times) const {
  grid.validate();
  return run_ensemble(dim(), x0_, grid, keep_times, rng, n_paths,
                      [&](std::size_t, PathRng& prng, auto&& observe) {
                        return walk(grid, prng, observe);
                      });
}

Vec deterministic_example(std::span<const double> x0, double t) {
  if (x0.size() != 2)
    throw ValidationError("the circle-flow example lives in two dimensions");
  constexpr double tol = 1e-9;
  const double up = x0[0] * x0[0] + (x0[1] - 1.0) * (x0[1] - 1.0) - 1.0;
  const double dn = x0[0] * x0[0] + (x0[1] + 1.0) * (x0[1] + 1.0) - 1.0;
  double u0;
  if (std::abs(up) <= tol) {
    u0 = std::atan2(x0[0], 1.0 - x0[1]);
    if (u0 < 0.0) u0 += kTwoPi;
  } else if (std::abs(dn) <= tol) {
    u0 = std::atan2(x0[0], x0[1] + 1.0);
    if (u0 < 0.0) u0 += kTwoPi;
    u0 += kTwoPi;
  } else {
    return {x0[0], x0[1]};
  }
  double u = std::fmod(u0 + t, 2.0 * kTwoPi);
  if (u < 0.0) u += 2.0 * kTwoPi;
  if (u < kTwoPi) return {std::sin(u), 1.0 - std::cos(u)};
  u -= kTwoPi;
  return {std::sin(u), std::cos(u) - 1.0};
}

Vec max_process(const PathEnsemble& e, double t) {
  const double slack = 1e-12 * std::max(1.0, e.horizon);
  if (!(t >= 0.0) || t > e.horizon + slack)
    throw ValidationError("time is outside the grid horizon");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < e.times.size(); ++i)
    if (e.times[i] <= t + slack) idx = i;
  Vec out(std::size_t(e.paths()));
  for (long p = 0; p < e.paths(); ++p) out[std::size_t(p)] = e.path_max[std::size_t(p)][idx];
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (long p : e.exploded) out[std::size_t(p)] = nan;
  return out;
}

}  // namespace symindex
