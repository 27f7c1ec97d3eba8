#include "symindex/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "symindex/ball_grid.hpp"
#include "symindex/errors.hpp"
#include "symindex/parallel.hpp"

namespace symindex {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void check_positive_grid(std::span<const double> g, const char* what) {
  if (g.empty()) throw ValidationError(std::string(what) + " grid is empty");
  for (double v : g)
    if (!std::isfinite(v) || v <= 0.0)
      throw ValidationError(std::string(what) + " grid must be positive");
}

// Ensemble resolution: n_steps = 0 means 16 steps per smallest requested time.
long auto_steps(double horizon, double t_min, long n_steps) {
  if (n_steps > 0) return n_steps;
  const double want = 16.0 * horizon / t_min;
  return std::clamp<long>(long(std::llround(want)), 16, 1L << 20);
}

double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return kNan;
  const double pos = q * double(v.size() - 1);
  const std::size_t lo = std::size_t(pos);
  if (lo + 1 >= v.size()) return v.back();
  const double f = pos - double(lo);
  return v[lo] * (1.0 - f) + v[lo + 1] * f;
}

// Least-squares slope of log y against log x over the points with y > 0.
// Returns the number of usable points.
int loglog_slope(const std::vector<double>& x, const std::vector<double>& y,
                 double* slope) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  const double den = double(n) * sxx - sx * sx;
  *slope = (n >= 2 && den != 0.0) ? (double(n) * sxy - sx * sy) / den : 0.0;
  return n;
}

std::uint64_t level_seed(const RngSpec& rng, int level) {
  std::uint64_t st = rng.seed + 0x632be59bd9b4e019ULL * std::uint64_t(level + 1);
  return splitmix64(st);
}

}  // namespace

BoundConstants bound_constants(int d) {
  if (d < 1) throw ValidationError("dimension must be at least 1");
  BoundConstants b;
  b.c = 1.0 / (1.0 - std::exp(-0.5));
  b.c_tilde = 2.0 * b.c * double(d + 1);
  b.c_d = 4.0 * double(d) + 16.0 * b.c_tilde;
  return b;
}

WilsonInterval wilson_interval(double p_hat, long n, double z) {
  if (n < 1) throw ValidationError("Wilson interval needs at least one trial");
  if (!(z > 0.0)) throw ValidationError("Wilson interval needs a positive quantile");
  const double nn = double(n);
  const double denom = 1.0 + z * z / nn;
  const double center = (p_hat + z * z / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(p_hat * (1.0 - p_hat) / nn + z * z / (4.0 * nn * nn)) / denom;
  WilsonInterval w;
  w.low = std::max(0.0, center - half);
  w.high = std::min(1.0, center + half);
  return w;
}

std::vector<SymbolEstimate> empirical_symbol(const SymbolModel& m,
                                             std::span<const double> x,
                                             std::span<const double> xi,
                                             std::span<const double> t_seq,
                                             double k_radius, const RngSpec& rng,
                                             long n_paths, long steps_per_smallest) {
  check_positive_grid(t_seq, "time");
  for (std::size_t i = 1; i < t_seq.size(); ++i)
    if (!(t_seq[i] < t_seq[i - 1]))
      throw ValidationError("time grid must be strictly decreasing");
  if (!(k_radius > 0.0)) throw ValidationError("stopping radius must be positive");
  if (xi.size() != x.size())
    throw ValidationError("xi and x must have the model dimension");
  if (n_paths < 1) throw ValidationError("need at least one path");
  if (steps_per_smallest < 1) throw ValidationError("need at least one step per time");

  ModelSimulator sim(m, x);
  const int d = sim.dim();
  const double horizon = t_seq[0];
  const double t_min = t_seq.back();
  const long n_steps =
      std::llround(std::ceil(double(steps_per_smallest) * horizon / t_min));
  const PathGrid grid{horizon, n_steps};
  const std::size_t nt = t_seq.size();
  // kept node per time, ascending in time
  std::vector<long> nodes(nt);
  for (std::size_t j = 0; j < nt; ++j)
    nodes[j] = std::clamp<long>(std::llround(t_seq[nt - 1 - j] / grid.dt()), 0,
                                n_steps);

  std::vector<double> cosv(std::size_t(n_paths) * nt, kNan);
  std::vector<double> sinv(std::size_t(n_paths) * nt, kNan);
  parallel_for(std::size_t(n_paths), [&](std::size_t p) {
    PathRng prng(rng, std::uint64_t(p));
    double* cs = cosv.data() + p * nt;
    double* sn = sinv.data() + p * nt;
    std::size_t pos = 0;
    auto observe = [&](long k, double, std::span<const double> y) {
      double arg = 0.0, dist2 = 0.0;
      for (int i = 0; i < d; ++i) {
        const double u = y[std::size_t(i)] - x[std::size_t(i)];
        arg += xi[std::size_t(i)] * u;
        dist2 += u * u;
      }
      if (pos < nt && nodes[pos] == k) {
        cs[pos] = std::cos(arg);
        sn[pos] = std::sin(arg);
        ++pos;
      }
      if (dist2 > k_radius * k_radius) {
        // sigma reached: the stopped state feeds every later time
        for (; pos < nt; ++pos) {
          cs[pos] = std::cos(arg);
          sn[pos] = std::sin(arg);
        }
        return false;
      }
      return true;
    };
    sim.walk(grid, prng, observe);
  });

  std::vector<SymbolEstimate> out(nt);
  for (std::size_t j = 0; j < nt; ++j) {
    double sc = 0, ss = 0, scc = 0, sss = 0;
    long n = 0;
    for (long p = 0; p < n_paths; ++p) {
      const double c = cosv[std::size_t(p) * nt + j];
      const double s = sinv[std::size_t(p) * nt + j];
      if (std::isnan(c)) continue;
      sc += c;
      ss += s;
      scc += c * c;
      sss += s * s;
      ++n;
    }
    SymbolEstimate& e = out[nt - 1 - j];  // back to the caller's decreasing order
    e.t = grid.time_at(nodes[j]);
    e.used_paths = n;
    if (n == 0) {
      e.value = {kNan, kNan};
      continue;
    }
    const double mc = sc / double(n), ms = ss / double(n);
    e.value.re = (1.0 - mc) / e.t;
    e.value.im = -ms / e.t;
    const double vc = std::max(0.0, scc / double(n) - mc * mc);
    const double vs = std::max(0.0, sss / double(n) - ms * ms);
    e.se_re = std::sqrt(vc / double(n)) / e.t;
    e.se_im = std::sqrt(vs / double(n)) / e.t;
    const double mag = std::hypot(e.value.re, e.value.im);
    if (3.0 * std::hypot(e.se_re, e.se_im) > 0.25 * std::max(mag, 1e-12))
      e.warning = "Monte Carlo noise dominates this estimate; increase the path count";
  }
  return out;
}

BoundCheckReport check_upper_bound(const SymbolModel& m, std::span<const double> x,
                                   std::span<const double> t_grid,
                                   std::span<const double> r_grid, const RngSpec& rng,
                                   long n_paths, const BallOptimizerConfig& cfg,
                                   long n_steps) {
  check_positive_grid(t_grid, "time");
  check_positive_grid(r_grid, "radius");
  BoundCheckReport rep;
  rep.constants = bound_constants(int(x.size()));
  rep.z = inverse_normal_cdf(0.995);
  rep.paths = n_paths;

  ModelSimulator sim(m, x);
  const double horizon = *std::max_element(t_grid.begin(), t_grid.end());
  const double t_min = *std::min_element(t_grid.begin(), t_grid.end());
  const PathGrid grid{horizon, auto_steps(horizon, t_min, n_steps)};
  PathEnsemble e = sim.ensemble(grid, rng, n_paths, t_grid);
  rep.excluded = long(e.exploded.size());
  const long n_valid = n_paths - rep.excluded;
  if (n_valid < 1) throw NumericError("every path exploded");

  std::vector<double> h_of_r(r_grid.size());
  for (std::size_t i = 0; i < r_grid.size(); ++i)
    h_of_r[i] = H_local(m, x, r_grid[i], cfg);

  for (double t : t_grid) {
    const Vec mx = max_process(e, t);
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
      BoundCell cell;
      cell.t = t;
      cell.r = r_grid[i];
      long hits = 0;
      for (double v : mx)
        if (v >= cell.r) ++hits;  // NaN compares false
      cell.p_hat = double(hits) / double(n_valid);
      const WilsonInterval ci = wilson_interval(cell.p_hat, n_valid, rep.z);
      cell.ci_low = ci.low;
      cell.ci_high = ci.high;
      cell.bound = rep.constants.c_d * t * h_of_r[i];
      cell.pass = cell.ci_low <= cell.bound;
      rep.all_pass = rep.all_pass && cell.pass;
      rep.cells.push_back(cell);
    }
  }
  return rep;
}

LowerBoundReport check_lower_bound(const SymbolModel& m, std::span<const double> x,
                                   std::span<const double> t_grid,
                                   std::span<const double> r_grid,
                                   const SectorEstimate& sector, const RngSpec& rng,
                                   long n_paths, const BallOptimizerConfig& cfg,
                                   long n_steps) {
  check_positive_grid(t_grid, "time");
  check_positive_grid(r_grid, "radius");
  if (!sector.satisfied)
    throw ValidationError(
        "the lower bound is defined only under the sector condition");
  LowerBoundReport rep;
  rep.sector = sector;
  rep.paths = n_paths;

  ModelSimulator sim(m, x);
  const double horizon = *std::max_element(t_grid.begin(), t_grid.end());
  const double t_min = *std::min_element(t_grid.begin(), t_grid.end());
  const PathGrid grid{horizon, auto_steps(horizon, t_min, n_steps)};
  PathEnsemble e = sim.ensemble(grid, rng, n_paths, t_grid);
  rep.excluded = long(e.exploded.size());
  const long n_valid = n_paths - rep.excluded;
  if (n_valid < 1) throw NumericError("every path exploded");

  std::vector<double> h_of_r(r_grid.size());
  for (std::size_t i = 0; i < r_grid.size(); ++i)
    h_of_r[i] = h_local(m, x, r_grid[i], sector, cfg);

  std::vector<double> ts(t_grid.begin(), t_grid.end());
  std::vector<double> per_t_max(ts.size(), 0.0);
  for (std::size_t j = 0; j < ts.size(); ++j) {
    const Vec mx = max_process(e, ts[j]);
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
      LowerCell cell;
      cell.t = ts[j];
      cell.r = r_grid[i];
      long below = 0;
      for (double v : mx)
        if (v < cell.r) ++below;  // NaN compares false
      cell.q_hat = double(below) / double(n_valid);
      cell.h = h_of_r[i];
      cell.product = cell.q_hat * cell.t * cell.h;
      per_t_max[j] = std::max(per_t_max[j], cell.product);
      rep.c_kappa_hat = std::max(rep.c_kappa_hat, cell.product);
      rep.cells.push_back(cell);
    }
  }
  const int used = loglog_slope(ts, per_t_max, &rep.trend_slope);
  rep.inconclusive = used < 2;
  rep.flat = !rep.inconclusive && std::abs(rep.trend_slope) <= 0.2;
  return rep;
}

ScalingReport scaling_diagnostic(const SymbolModel& m, std::span<const double> x,
                                 double lambda, ScalingDirection direction,
                                 const RngSpec& rng, long paths_per_level,
                                 const ScalingOptions& opt) {
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
  if (paths_per_level < 2) throw ValidationError("need at least two paths per level");
  if (opt.n_steps < 1) throw ValidationError("need at least one step per level");
  if (opt.index_hint && std::abs(lambda - *opt.index_hint) < 0.1)
    throw ValidationError(
        "lambda sits within 0.1 of the known index; the theorems say nothing at "
        "their boundary");
  const bool to_zero = direction == ScalingDirection::ToZero;
  const int k_min = opt.k_min.value_or(to_zero ? 2 : 0);
  const int k_max = opt.k_max.value_or(to_zero ? 14 : 12);
  if (k_max < k_min) throw ValidationError("empty dyadic level range");

  ScalingReport rep;
  rep.lambda = lambda;
  rep.direction = direction;
  rep.paths_per_level = paths_per_level;

  ModelSimulator sim(m, x);
  long exploded = 0;
  for (int k = k_min; k <= k_max; ++k) {
    const double t = std::ldexp(1.0, to_zero ? -k : k);
    const PathGrid grid{t, opt.n_steps};
    const std::vector<double> keep = {t};
    PathEnsemble e =
        sim.ensemble(grid, RngSpec{level_seed(rng, k - k_min)}, paths_per_level, keep);
    exploded += long(e.exploded.size());
    const Vec mx = max_process(e, t);
    std::vector<double> stat;
    stat.reserve(mx.size());
    const double scale = std::pow(t, -1.0 / lambda);
    for (double v : mx)
      if (!std::isnan(v)) stat.push_back(scale * v);
    std::sort(stat.begin(), stat.end());
    ScalingLevel lev;
    lev.t = t;
    lev.median = quantile_sorted(stat, 0.5);
    lev.q90 = quantile_sorted(stat, 0.9);
    rep.levels.push_back(lev);
  }
  const long total = paths_per_level * long(k_max - k_min + 1);
  rep.exploded_fraction = double(exploded) / double(total);
  if (rep.exploded_fraction > 0.001)
    throw NumericError("exploded-path fraction " +
                       std::to_string(rep.exploded_fraction) +
                       " exceeds 0.1%; refine the step size");

  const std::size_t n = rep.levels.size();
  const int w = std::min<int>(opt.window, int(n) - 1);
  bool down = w >= 1, up = w >= 1;
  for (std::size_t i = n - std::size_t(w); i < n; ++i) {
    down = down && rep.levels[i].median < rep.levels[i - 1].median;
    up = up && rep.levels[i].median > rep.levels[i - 1].median;
  }
  const double first = rep.levels.front().median;
  const double last = rep.levels.back().median;
  if (down && first > 0.0 && (last == 0.0 || first / last >= opt.factor))
    rep.verdict = "tends-to-0";
  else if (up && first > 0.0 && last / first >= opt.factor)
    rep.verdict = "tends-to-infinity";
  else
    rep.verdict = "inconclusive";
  return rep;
}

}  // namespace symindex
