#include "symindex/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "symindex/errors.hpp"
#include "symindex/parallel.hpp"

namespace symindex {

namespace {

constexpr double kPi = 3.141592653589793;
constexpr double kSectorTol = 1e-9;

struct InnerResult {
  double value = -std::numeric_limits<double>::infinity();
  Vec arg;
};

// sup over the closed unit eps-ball of |p(y, eps*inv_scale)| (or the real part),
// initial grid plus shrinking local re-grids around the incumbent.
InnerResult eps_search(const PreparedSymbol& ps, double inv_scale, bool real_part,
                       const BallOptimizerConfig& cfg, bool threaded) {
  auto objective = [&](const Vec& eps) -> double {
    Vec xi(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) xi[i] = eps[i] * inv_scale;
    SymbolValue p = ps.eval(xi, cfg.quad, nullptr);
    return real_part ? p.re : std::hypot(p.re, p.im);
  };
  InnerResult best;
  auto scan = [&](const std::vector<Vec>& cands) {
    std::vector<double> vals(cands.size());
    if (threaded)
      parallel_for(cands.size(), [&](std::size_t i) { vals[i] = objective(cands[i]); });
    else
      for (std::size_t i = 0; i < cands.size(); ++i) vals[i] = objective(cands[i]);
    for (std::size_t i = 0; i < cands.size(); ++i)
      if (vals[i] > best.value) best = {vals[i], cands[i]};
  };
  scan(unit_ball_grid(ps.dim, cfg.sphere_directions, cfg.radial_levels));
  double scale = 1.0;
  for (int pass = 0; pass < cfg.refine_passes; ++pass) {
    scale /= cfg.shrink_factor;
    scan(local_ball_grid(best.arg, scale, cfg.sphere_directions, cfg.radial_levels));
  }
  return best;
}

std::vector<int> active_coords(const SymbolModel& m) {
  std::vector<bool> mask = state_dependency_mask(m);
  std::vector<int> act;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) act.push_back(static_cast<int>(i));
  return act;
}

// y-ball node budget split into directions x radial levels
std::pair<int, int> ball_budget(int k, const BallOptimizerConfig& cfg) {
  if (k == 1) return {2, std::max(1, cfg.y_grid / 2)};
  const int levels = std::max(1, cfg.radial_levels);
  return {std::max(2, cfg.y_grid / levels), levels};
}

// sup or inf over the ball of states \|y - x\| <= 2R of the inner eps-objective
double y_ball_search(const SymbolModel& m, std::span<const double> x, double R,
                     double inv_scale, bool real_part, bool minimize,
                     const BallOptimizerConfig& cfg) {
  const std::vector<int> act = active_coords(m);
  const double sgn = minimize ? -1.0 : 1.0;
  auto value_at = [&](const Vec& u) -> double {
    // u is a displacement in the active subspace, \|u\| <= 1
    Vec y(x.begin(), x.end());
    for (std::size_t i = 0; i < act.size(); ++i) y[act[i]] += 2.0 * R * u[i];
    PreparedSymbol ps = prepare_symbol(m, y, cfg.quad);
    return sgn * eps_search(ps, inv_scale, real_part, cfg, act.empty()).value;
  };
  if (act.empty()) return sgn * value_at({});

  const int k = static_cast<int>(act.size());
  auto [dirs, levels] = ball_budget(k, cfg);
  InnerResult best;
  auto scan = [&](std::vector<Vec> cands) {
    std::vector<double> vals(cands.size());
    parallel_for(cands.size(), [&](std::size_t i) { vals[i] = value_at(cands[i]); });
    for (std::size_t i = 0; i < cands.size(); ++i)
      if (vals[i] > best.value) best = {vals[i], cands[i]};
  };
  std::vector<Vec> init = unit_ball_grid(k, dirs, levels);
  init.insert(init.begin(), Vec(k, 0.0));  // the center y = x
  scan(std::move(init));
  double scale = 1.0;
  for (int pass = 0; pass < cfg.refine_passes; ++pass) {
    scale /= cfg.shrink_factor;
    scan(local_ball_grid(best.arg, scale, dirs, levels));
  }
  return sgn * best.value;
}

int box_axis_count(int k, const BallOptimizerConfig& cfg) {
  const double per = std::pow(static_cast<double>(cfg.y_grid), 1.0 / std::max(1, k));
  return std::max(2, static_cast<int>(per));
}

// Sup or inf over a bounded state box, batched over the whole R grid so each state is
// prepared once. arg_scale(r) gives the xi magnitude 1/R or 1/(4 kappa R).
std::vector<double> box_search_batch(const SymbolModel& m, std::span<const double> r_grid,
                                     const Box& dom, bool real_part,
                                     const std::function<double(double)>& arg_scale,
                                     bool minimize, const BallOptimizerConfig& cfg) {
  dom.validate();
  if (dom.dim() != model_dim(m))
    throw ValidationError("state domain dimension disagrees with the model");
  const std::vector<bool> mask = state_dependency_mask(m);
  int k = 0;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i] && dom.hi[i] > dom.lo[i]) ++k;
  const int per_axis = box_axis_count(k, cfg);
  const double sgn = minimize ? -1.0 : 1.0;

  std::map<Vec, PreparedSymbol> cache;
  auto prepare_all = [&](const std::vector<Vec>& nodes) {
    std::vector<const Vec*> missing;
    for (const Vec& y : nodes)
      if (!cache.count(y)) missing.push_back(&y);
    std::vector<PreparedSymbol> slots(missing.size());
    parallel_for(missing.size(), [&](std::size_t i) {
      slots[i] = prepare_symbol(m, *missing[i], cfg.quad);
    });
    for (std::size_t i = 0; i < missing.size(); ++i)
      cache.emplace(*missing[i], std::move(slots[i]));
  };

  const std::vector<Vec> base_nodes = box_grid(dom, per_axis, mask);
  prepare_all(base_nodes);

  std::vector<double> out(r_grid.size());
  for (std::size_t ri = 0; ri < r_grid.size(); ++ri) {
    const double inv_scale = arg_scale(r_grid[ri]);
    InnerResult best;
    auto scan = [&](const std::vector<Vec>& nodes) {
      std::vector<double> vals(nodes.size());
      parallel_for(nodes.size(), [&](std::size_t i) {
        vals[i] =
            sgn * eps_search(cache.at(nodes[i]), inv_scale, real_part, cfg, false).value;
      });
      for (std::size_t i = 0; i < nodes.size(); ++i)
        if (vals[i] > best.value) best = {vals[i], nodes[i]};
    };
    scan(base_nodes);
    Box local = dom;
    for (int pass = 0; pass < cfg.refine_passes; ++pass) {
      local = shrink_box(local, best.arg, cfg.shrink_factor);
      std::vector<Vec> nodes = box_grid(local, per_axis, mask);
      prepare_all(nodes);
      scan(nodes);
    }
    out[ri] = sgn * best.value;
  }
  return out;
}

void check_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw ValidationError("the radius R must be positive and finite");
}

double stable_like_envelope(const StableLikeFamily& f, double u, bool minimize) {
  const double a = std::pow(u, f.alpha_min), b = std::pow(u, f.alpha_max);
  return minimize ? std::min(a, b) : std::max(a, b);
}

void require_sector(const SectorEstimate& sector) {
  if (!sector.satisfied)
    throw ValidationError(
        "the lower functional is defined only under the sector condition");
  if (!(sector.kappa > 0.0)) throw ValidationError("sector estimate has kappa <= 0");
}

}  // namespace

void BallOptimizerConfig::validate() const {
  if (sphere_directions < 2 || radial_levels < 1 || y_grid < 2)
    throw ValidationError("optimizer grid counts must be at least 2");
  if (refine_passes < 0) throw ValidationError("refinement passes must be >= 0");
  if (!(shrink_factor >= 1.0)) throw ValidationError("shrink factor must be >= 1");
}

double kappa_from_c0(double c0) {
  if (!(c0 >= 0.0) || !std::isfinite(c0))
    throw ValidationError("sector constant must be finite and >= 0");
  if (c0 == 0.0) return 1.0 / (2.0 * kPi);
  return 1.0 / (4.0 * std::atan(1.0 / (2.0 * c0)));
}

double H_local(const SymbolModel& m, std::span<const double> x, double R,
               const BallOptimizerConfig& cfg) {
  cfg.validate();
  check_radius(R);
  return y_ball_search(m, x, R, 1.0 / R, false, false, cfg);
}

double h_local(const SymbolModel& m, std::span<const double> x, double R,
               const SectorEstimate& sector, const BallOptimizerConfig& cfg) {
  cfg.validate();
  check_radius(R);
  require_sector(sector);
  return y_ball_search(m, x, R, 1.0 / (4.0 * sector.kappa * R), true, true, cfg);
}

std::vector<double> H_global_batch(const SymbolModel& m, std::span<const double> r_grid,
                                   const std::optional<Box>& y_domain,
                                   const BallOptimizerConfig& cfg,
                                   bool* domain_restricted) {
  cfg.validate();
  for (double r : r_grid) check_radius(r);
  if (domain_restricted) *domain_restricted = false;
  const GlobalSupKind kind = global_sup_kind(m);
  std::vector<double> out(r_grid.size());
  if (kind == GlobalSupKind::StateFree) {
    PreparedSymbol ps = prepare_symbol(m, Vec(model_dim(m), 0.0), cfg.quad);
    for (std::size_t i = 0; i < r_grid.size(); ++i)
      out[i] = eps_search(ps, 1.0 / r_grid[i], false, cfg, true).value;
    return out;
  }
  if (kind == GlobalSupKind::StableLikeBounds) {
    const auto& f = std::get<StableLikeFamily>(m.family);
    for (std::size_t i = 0; i < r_grid.size(); ++i)
      out[i] = stable_like_envelope(f, f.scale / r_grid[i], false);
    return out;
  }
  if (!y_domain)
    throw ValidationError(
        "the global supremum over states is unbounded for this model; provide a "
        "bounded y_domain");
  if (domain_restricted) *domain_restricted = true;
  return box_search_batch(
      m, r_grid, *y_domain, false, [](double r) { return 1.0 / r; }, false, cfg);
}

std::vector<double> h_global_batch(const SymbolModel& m, std::span<const double> r_grid,
                                   const SectorEstimate& sector,
                                   const std::optional<Box>& y_domain,
                                   const BallOptimizerConfig& cfg,
                                   bool* domain_restricted) {
  cfg.validate();
  for (double r : r_grid) check_radius(r);
  require_sector(sector);
  if (domain_restricted) *domain_restricted = false;
  const double factor = 4.0 * sector.kappa;
  const GlobalSupKind kind = global_sup_kind(m);
  std::vector<double> out(r_grid.size());
  if (kind == GlobalSupKind::StateFree) {
    PreparedSymbol ps = prepare_symbol(m, Vec(model_dim(m), 0.0), cfg.quad);
    for (std::size_t i = 0; i < r_grid.size(); ++i)
      out[i] = eps_search(ps, 1.0 / (factor * r_grid[i]), true, cfg, true).value;
    return out;
  }
  if (kind == GlobalSupKind::StableLikeBounds) {
    const auto& f = std::get<StableLikeFamily>(m.family);
    for (std::size_t i = 0; i < r_grid.size(); ++i)
      out[i] = stable_like_envelope(f, f.scale / (factor * r_grid[i]), true);
    return out;
  }
  if (!y_domain)
    throw ValidationError(
        "the global infimum over states is unbounded for this model; provide a "
        "bounded y_domain");
  if (domain_restricted) *domain_restricted = true;
  return box_search_batch(
      m, r_grid, *y_domain, true, [factor](double r) { return 1.0 / (factor * r); },
      true, cfg);
}

GlobalValue H_global(const SymbolModel& m, double R, const std::optional<Box>& y_domain,
                     const BallOptimizerConfig& cfg) {
  bool restricted = false;
  std::vector<double> v = H_global_batch(m, std::span<const double>(&R, 1), y_domain,
                                         cfg, &restricted);
  return {v[0], restricted};
}

GlobalValue h_global(const SymbolModel& m, double R, const SectorEstimate& sector,
                     const std::optional<Box>& y_domain, const BallOptimizerConfig& cfg) {
  bool restricted = false;
  std::vector<double> v = h_global_batch(m, std::span<const double>(&R, 1), sector,
                                         y_domain, cfg, &restricted);
  return {v[0], restricted};
}

SectorEstimate estimate_sector_constant(const SymbolModel& m, const Box& x_domain,
                                        const Box& xi_domain,
                                        const BallOptimizerConfig& cfg) {
  cfg.validate();
  x_domain.validate();
  xi_domain.validate();
  const int d = model_dim(m);
  if (x_domain.dim() != d || xi_domain.dim() != d)
    throw ValidationError("sampling domain dimension disagrees with the model");

  const std::vector<bool> mask = state_dependency_mask(m);
  int k = 0;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i] && x_domain.hi[i] > x_domain.lo[i]) ++k;
  const std::vector<Vec> x_nodes = box_grid(x_domain, box_axis_count(k, cfg), mask);

  // arguments along rays from the origin, log-spaced up to the box boundary
  const int n_radii = 2 * cfg.radial_levels + 1;
  std::vector<Vec> xi_nodes;
  for (const Vec& u : sphere_directions(d, cfg.sphere_directions)) {
    double tmax = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) {
      if (u[i] > 0.0)
        tmax = std::min(tmax, xi_domain.hi[i] / u[i]);
      else if (u[i] < 0.0)
        tmax = std::min(tmax, xi_domain.lo[i] / u[i]);
    }
    if (!(tmax > 0.0) || !std::isfinite(tmax)) continue;
    for (double t : log_spaced(tmax * 1e-6, tmax, n_radii)) {
      Vec xi(d);
      for (int i = 0; i < d; ++i) xi[i] = t * u[i];
      xi_nodes.push_back(std::move(xi));
    }
  }
  if (xi_nodes.empty())
    throw ValidationError("the argument domain contains no rays from the origin");

  struct Slot {
    double ratio = -1.0;
    Vec xi;
    bool violated = false;
    Vec viol_xi;
  };
  std::vector<Slot> slots(x_nodes.size());
  parallel_for(x_nodes.size(), [&](std::size_t i) {
    PreparedSymbol ps = prepare_symbol(m, x_nodes[i], cfg.quad);
    Slot& s = slots[i];
    for (const Vec& xi : xi_nodes) {
      SymbolValue p = ps.eval(xi, cfg.quad, nullptr);
      const double im = std::abs(p.im);
      if (p.re <= kSectorTol) {
        if (im > kSectorTol && !s.violated) {
          s.violated = true;
          s.viol_xi = xi;
        }
        continue;
      }
      const double ratio = im / p.re;
      if (ratio > s.ratio) {
        s.ratio = ratio;
        s.xi = xi;
      }
    }
  });

  SectorEstimate est;
  est.c0 = 0.0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].violated && est.satisfied) {
      est.satisfied = false;
      est.worst_x = x_nodes[i];
      est.worst_xi = slots[i].viol_xi;
    }
    if (slots[i].ratio > est.c0) {
      est.c0 = slots[i].ratio;
      if (est.satisfied) {
        est.worst_x = x_nodes[i];
        est.worst_xi = slots[i].xi;
      }
    }
  }
  est.kappa = kappa_from_c0(est.c0);
  return est;
}

double check_local_growth(const SymbolModel& m, const Box& compact_box,
                          const BallOptimizerConfig& cfg) {
  cfg.validate();
  compact_box.validate();
  const int d = model_dim(m);
  if (compact_box.dim() != d)
    throw ValidationError("sampling domain dimension disagrees with the model");
  const std::vector<bool> mask = state_dependency_mask(m);
  int k = 0;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i] && compact_box.hi[i] > compact_box.lo[i]) ++k;
  const std::vector<Vec> x_nodes = box_grid(compact_box, box_axis_count(k, cfg), mask);
  const std::vector<Vec> dirs = sphere_directions(d, cfg.sphere_directions);
  const Vec radii = log_spaced(1e-2, 1e6, 33);

  std::vector<double> vals(x_nodes.size(), 0.0);
  parallel_for(x_nodes.size(), [&](std::size_t i) {
    PreparedSymbol ps = prepare_symbol(m, x_nodes[i], cfg.quad);
    double best = 0.0;
    for (const Vec& u : dirs) {
      Vec xi(d);
      for (double t : radii) {
        for (int j = 0; j < d; ++j) xi[j] = t * u[j];
        SymbolValue p = ps.eval(xi, cfg.quad, nullptr);
        best = std::max(best, std::hypot(p.re, p.im) / (1.0 + t * t));
      }
    }
    vals[i] = best;
  });
  double out = 0.0;
  for (double v : vals) out = std::max(out, v);
  return out;
}

}  // namespace symindex
