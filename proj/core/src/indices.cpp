#include "symindex/indices.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "symindex/errors.hpp"

namespace symindex {

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

void check_grid(std::span<const double> r, bool increasing) {
  if (r.size() < 2) throw ValidationError("the radius grid needs at least two points");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0.0) || !std::isfinite(r[i]))
      throw ValidationError("radius grid entries must be positive and finite");
    if (i > 0 && (increasing ? r[i] <= r[i - 1] : r[i] >= r[i - 1]))
      throw ValidationError(increasing ? "origin-side radius grid must increase"
                                       : "infinity-side radius grid must decrease");
  }
}

void check_values(std::span<const double> r, std::span<const double> v,
                  const char* name) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]) || !(v[i] > 0.0))
      throw NumericError(std::string(name) + "(R) = " + num(v[i]) +
                         " is unusable at R = " + num(r[i]) +
                         "; the exponent is undefined there");
}

SectorEstimate origin_sector(const SymbolModel& m, const std::optional<Box>& y_domain,
                             const BallOptimizerConfig& cfg) {
  const int d = model_dim(m);
  Box xd = y_domain ? *y_domain : Box{Vec(d, 0.0), Vec(d, 0.0)};
  Box xid{Vec(d, -10.0), Vec(d, 10.0)};
  return estimate_sector_constant(m, xd, xid, cfg);
}

}  // namespace

Vec dyadic_grid_up(int kmax) {
  if (kmax < 1) throw ValidationError("dyadic grid needs kmax >= 1");
  Vec r(kmax + 1);
  for (int k = 0; k <= kmax; ++k) r[k] = std::ldexp(1.0, k);
  return r;
}

Vec dyadic_grid_down(int kmax) {
  if (kmax < 1) throw ValidationError("dyadic grid needs kmax >= 1");
  Vec r(kmax + 1);
  for (int k = 0; k <= kmax; ++k) r[k] = std::ldexp(1.0, -k);
  return r;
}

std::pair<Vec, Vec> local_exponents(std::span<const double> r,
                                    std::span<const double> v) {
  if (r.size() != v.size())
    throw ValidationError("radius and value arrays must have equal length");
  Vec rr, g;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double lr = std::log(r[i]);
    if (lr == 0.0) continue;
    rr.push_back(r[i]);
    g.push_back(-std::log(v[i]) / lr);
  }
  return {std::move(rr), std::move(g)};
}

std::pair<double, double> window_min_max(std::span<const double> g, int w) {
  if (g.empty()) throw ValidationError("empty exponent array");
  if (w < 1) throw ValidationError("window must be at least 1");
  const std::size_t n = g.size();
  const std::size_t from = n > static_cast<std::size_t>(w) ? n - w : 0;
  double lo = g[from], hi = g[from];
  for (std::size_t i = from; i < n; ++i) {
    lo = std::min(lo, g[i]);
    hi = std::max(hi, g[i]);
  }
  return {lo, hi};
}

IndexReport estimate_indices_origin(const SymbolModel& m, std::span<const double> r_grid,
                                    const std::optional<Box>& y_domain,
                                    const BallOptimizerConfig& cfg, int window,
                                    std::optional<SectorEstimate> sector) {
  check_grid(r_grid, true);
  Vec used;
  for (double r : r_grid)
    if (std::log(r) != 0.0) used.push_back(r);
  if (used.size() < 2)
    throw ValidationError("the radius grid has fewer than two usable points");

  IndexReport rep;
  rep.window = window;
  rep.r_grid = used;

  bool restricted = false;
  rep.H_of_r = H_global_batch(m, used, y_domain, cfg, &restricted);
  rep.domain_restricted = restricted;
  check_values(used, rep.H_of_r, "H");
  rep.g_H = local_exponents(used, rep.H_of_r).second;
  auto [lo, hi] = window_min_max(rep.g_H, window);
  rep.beta0 = lo;        // liminf estimate
  rep.beta0_lower = hi;  // limsup estimate

  if (!sector) sector = origin_sector(m, y_domain, cfg);
  rep.sector = sector;
  if (sector->satisfied) {
    rep.h_of_r = h_global_batch(m, used, *sector, y_domain, cfg);
    check_values(used, *rep.h_of_r, "h");
    rep.g_h = local_exponents(used, *rep.h_of_r).second;
    auto [hlo, hhi] = window_min_max(*rep.g_h, window);
    rep.delta0_upper = hlo;
    rep.delta0 = hhi;
  }
  return rep;
}

IndexReport estimate_indices_infinity(const SymbolModel& m, std::span<const double> x,
                                      std::span<const double> r_grid,
                                      const BallOptimizerConfig& cfg, int window,
                                      std::optional<SectorEstimate> sector) {
  check_grid(r_grid, false);
  Vec used;
  for (double r : r_grid)
    if (std::log(r) != 0.0) used.push_back(r);
  if (used.size() < 2)
    throw ValidationError("the radius grid has fewer than two usable points");

  IndexReport rep;
  rep.window = window;
  rep.r_grid = used;
  rep.x.assign(x.begin(), x.end());

  rep.H_of_r.resize(used.size());
  for (std::size_t i = 0; i < used.size(); ++i)
    rep.H_of_r[i] = H_local(m, x, used[i], cfg);
  check_values(used, rep.H_of_r, "H");
  rep.g_H = local_exponents(used, rep.H_of_r).second;
  auto [lo, hi] = window_min_max(rep.g_H, window);
  rep.beta_inf = hi;        // limsup estimate
  rep.beta_inf_lower = lo;  // liminf estimate

  if (!sector) {
    Box xd{Vec(x.begin(), x.end()), Vec(x.begin(), x.end())};
    const int d = model_dim(m);
    Box xid{Vec(d, -10.0), Vec(d, 10.0)};
    sector = estimate_sector_constant(m, xd, xid, cfg);
  }
  rep.sector = sector;
  if (sector->satisfied) {
    Vec h(used.size());
    for (std::size_t i = 0; i < used.size(); ++i)
      h[i] = h_local(m, x, used[i], *sector, cfg);
    check_values(used, h, "h");
    rep.h_of_r = h;
    rep.g_h = local_exponents(used, h).second;
    auto [hlo, hhi] = window_min_max(*rep.g_h, window);
    rep.delta_inf_upper = hhi;
    rep.delta_inf = hlo;
  }
  return rep;
}

}  // namespace symindex
