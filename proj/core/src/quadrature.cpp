#include "symindex/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "symindex/errors.hpp"

namespace symindex {

namespace {

constexpr double kPi = 3.141592653589793;

// QUADPACK QK15 nodes/weights on [-1,1]. Indices 1,3,5,7 are the embedded G7 nodes.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                           0.417959183673469};

struct Interval {
  double a = 0.0, b = 0.0;
  Cplx val{0.0, 0.0};
  double err = 0.0;
  int depth = 0;
  bool refinable = true;
  // integrand this interval was computed with; refinement must reuse it (several
  // integrands can share one heap, e.g. the two half-lines of a two-sided integral)
  const std::function<Cplx(double)>* f = nullptr;
};

struct GkOut {
  Cplx val;
  double err;
  double fmax;
};

GkOut gk15(const std::function<Cplx(double)>& f, double a, double b, long& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  Cplx resk{0.0, 0.0};
  Cplx resg{0.0, 0.0};
  double fmax = 0.0;
  for (int j = 0; j < 8; ++j) {
    const double dx = h * kXgk[j];
    Cplx fsum;
    if (j == 7) {
      fsum = f(c);
      evals += 1;
      fmax = std::max(fmax, std::abs(fsum));
    } else {
      const Cplx f1 = f(c - dx);
      const Cplx f2 = f(c + dx);
      fsum = f1 + f2;
      evals += 2;
      fmax = std::max({fmax, std::abs(f1), std::abs(f2)});
    }
    resk += kWgk[j] * fsum;
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  resk *= h;
  resg *= h;
  return {resk, std::abs(resk - resg), fmax};
}

struct HeapLess {
  bool operator()(const Interval& x, const Interval& y) const { return x.err < y.err; }
};

struct Engine {
  const std::function<Cplx(double)>* f = nullptr;
  std::vector<Interval> heap;
  Cplx value{0.0, 0.0};
  double err = 0.0;
  long evals = 0;
  // Oscillation frequency of f when known. An interval spanning more than a period
  // under-samples the 15-point rule: the Gauss/Kronrod difference can vanish by
  // accident there, so its error keeps an explicit magnitude floor until refinement
  // resolves the oscillation.
  double osc_scale = 0.0;

  void push(double a, double b, int depth) {
    GkOut o = gk15(*f, a, b, evals);
    Interval iv{a, b, o.val, o.err, depth, true, f};
    if (osc_scale * (b - a) > 6.5) iv.err = std::max(iv.err, 0.3 * (b - a) * o.fmax);
    if (b - a < 1e-14 * (std::abs(a) + std::abs(b)) || depth >= 48) iv.refinable = false;
    value += iv.val;
    err += iv.err;
    heap.push_back(iv);
    std::push_heap(heap.begin(), heap.end(), HeapLess{});
  }

  void add_external(Cplx v, double e) {
    value += v;
    err += e;
  }

  void refine(double budget, int max_intervals) {
    while (err > budget && static_cast<int>(heap.size()) < max_intervals) {
      std::pop_heap(heap.begin(), heap.end(), HeapLess{});
      Interval worst = heap.back();
      if (!worst.refinable || worst.err <= budget * 1e-9) {
        std::push_heap(heap.begin(), heap.end(), HeapLess{});
        break;
      }
      heap.pop_back();
      value -= worst.val;
      err -= worst.err;
      f = worst.f;
      const double m = 0.5 * (worst.a + worst.b);
      push(worst.a, m, worst.depth + 1);
      push(m, worst.b, worst.depth + 1);
    }
  }
};

// Dyadic edges of [lo, hi] merged with any breakpoints falling inside.
std::vector<double> shell_edges(double lo, double hi, std::span<const double> bps) {
  std::vector<double> edges;
  if (!(hi > lo)) return edges;
  edges.push_back(lo);
  int k = static_cast<int>(std::floor(std::log2(lo))) + 1;
  for (; std::ldexp(1.0, k) < hi; ++k) {
    double e = std::ldexp(1.0, k);
    if (e > lo && e < hi) edges.push_back(e);
  }
  edges.push_back(hi);
  for (double b : bps)
    if (b > lo && b < hi) edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

double density_max3(const std::function<double(double)>& w, double a, double b) {
  return std::max({w(a), w(0.5 * (a + b)), w(b)});
}

// Coarse Simpson estimate of \int_a^b w.
double density_int3(const std::function<double(double)>& w, double a, double b) {
  return (w(a) + 4.0 * w(0.5 * (a + b)) + w(b)) / 6.0 * (b - a);
}

double tail_mass_from(const PowerLawFit& fit, double y) {
  if (fit.zero) return 0.0;
  if (fit.order <= 1.0 + 1e-9)
    throw IntegrabilityError("jump density tail not integrable: measured order " +
                             std::to_string(fit.order));
  return fit.coef * std::pow(y, 1.0 - fit.order) / (fit.order - 1.0);
}

double inner_moment_at(const PowerLawFit& fit, int m, double edge) {
  if (fit.zero) return 0.0;
  const double p = static_cast<double>(m) + 1.0 - fit.order;
  if (p <= 0.0)
    throw IntegrabilityError("jump density too singular at 0: order " +
                             std::to_string(fit.order) + " with moment " + std::to_string(m));
  return fit.coef * std::pow(edge, p) / p;
}

// The series below the inner edge needs |y xi| << 1 there; extend the dyadic range
// downward for very large |xi| (the power-law fit extrapolates toward 0).
double inner_edge_for(double axi) {
  if (axi * kShellInnerEdge <= 0.01) return kShellInnerEdge;
  const int k = static_cast<int>(std::floor(std::log2(0.01 / axi)));
  return std::ldexp(1.0, std::max(k, -900));
}

}  // namespace

Cplx oscillatory_core(double u, bool compensate) {
  const double au = std::abs(u);
  if (au < kSeriesThreshold) {
    // e^{iu} - 1 - iu = -u^2/2 - i u^3/6 + u^4/24 + i u^5/120 - ...
    const double u2 = u * u;
    double re = -0.5 * u2 + u2 * u2 / 24.0;
    double im = u * u2 * (-1.0 / 6.0 + u2 / 120.0);
    if (!compensate) im += u;
    return {re, im};
  }
  const double s = std::sin(0.5 * u);
  const double re = -2.0 * s * s;  // cos(u) - 1 without cancellation
  double im = std::sin(u);
  if (compensate) {
    if (au < 1e-2) {
      const double u2 = u * u;
      im = u * u2 * (-1.0 / 6.0 + u2 * (1.0 / 120.0 - u2 / 5040.0));
    } else {
      im -= u;
    }
  }
  return {re, im};
}

PowerLawFit fit_inner_power_law(const WeightedDensity1D& w) {
  PowerLawFit fit;
  fit.order = w.sing_order;
  if (w.exact_sing_coef) {
    fit.coef = *w.exact_sing_coef;
    fit.zero = fit.coef == 0.0;
    return fit;
  }
  const double y1 = kShellInnerEdge;
  const double y2 = 2.0 * kShellInnerEdge;
  const double c1 = w.density(y1) * std::pow(y1, w.sing_order);
  const double c2 = w.density(y2) * std::pow(y2, w.sing_order);
  if (c1 == 0.0 && c2 == 0.0) {
    fit.zero = true;
    return fit;
  }
  fit.coef = c1;
  fit.rel_uncertainty = std::abs(c1 - c2) / std::max({c1, c2, 1e-300});
  return fit;
}

PowerLawFit fit_outer_power_law(const WeightedDensity1D& w) {
  PowerLawFit fit;
  if (w.exact_tail_coef && w.exact_tail_order) {
    fit.coef = *w.exact_tail_coef;
    fit.order = *w.exact_tail_order;
    fit.zero = fit.coef == 0.0;
    return fit;
  }
  const double e = kShellOuterEdge;
  const double w1 = w.density(e);
  const double w2 = w.density(0.5 * e);
  const double w3 = w.density(0.25 * e);
  if (w1 == 0.0) {
    fit.zero = true;
    return fit;
  }
  const double s1 = std::log2(w2 / w1);  // local power order between e/2 and e
  const double s2 = w3 > 0.0 && w2 > 0.0 ? std::log2(w3 / w2) : s1;
  fit.order = s1;
  fit.coef = w1 * std::pow(e, s1);
  fit.rel_uncertainty = std::abs(s1 - s2) * std::log(2.0);
  return fit;
}

double inner_moment(const PowerLawFit& fit, int m) {
  return inner_moment_at(fit, m, kShellInnerEdge);
}

double outer_tail_mass(const PowerLawFit& fit) { return tail_mass_from(fit, kShellOuterEdge); }

QuadResult integrate_shells(const std::function<Cplx(double)>& g, const WeightedDensity1D& w,
                            bool positive_side, bool negative_side, double osc_scale,
                            std::span<const double> extra_breakpoints,
                            const QuadOptions& opt) {
  std::vector<double> bps(w.breakpoints.begin(), w.breakpoints.end());
  bps.insert(bps.end(), extra_breakpoints.begin(), extra_breakpoints.end());
  const auto edges = shell_edges(kShellInnerEdge, kShellOuterEdge, bps);

  Engine eng;
  eng.osc_scale = osc_scale;
  std::function<Cplx(double)> fpos = [&](double t) { return g(t) * w.density(t); };
  std::function<Cplx(double)> fneg = [&](double t) { return g(-t) * w.density(-t); };

  for (int side = 0; side < 2; ++side) {
    if (side == 0 && !positive_side) continue;
    if (side == 1 && !negative_side) continue;
    eng.f = side == 0 ? &fpos : &fneg;
    auto wside = [&](double t) { return w.density(side == 0 ? t : -t); };
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const double a = edges[i], b = edges[i + 1];
      if (density_max3(wside, a, b) == 0.0) continue;
      // Sample-based contribution bound; pruned pieces contribute only to the error.
      const double gmax = std::max({std::abs((*eng.f)(a)), std::abs((*eng.f)(0.5 * (a + b))),
                                    std::abs((*eng.f)(b))});
      eng.evals += 3;
      const double bound = 4.0 * (gmax + 1e-300) * (b - a);
      if (bound < opt.abs_tol * 1e-6) {
        eng.add_external({0.0, 0.0}, bound);
        continue;
      }
      int pieces = 1;
      if (osc_scale > 0.0) {
        const double want = (b - a) * osc_scale / kPi;
        pieces = want > 1.0 ? static_cast<int>(std::min(64.0, std::ceil(want))) : 1;
      }
      const double step = (b - a) / pieces;
      for (int p = 0; p < pieces; ++p) eng.push(a + p * step, a + (p + 1) * step, 0);
    }
  }
  eng.refine(opt.abs_tol, opt.max_intervals);
  return {eng.value, eng.err, eng.evals};
}

namespace {

// ------------------- Levy-Khinchine integral on one half line -------------------
//
//   I = \int_0^inf (e^{i t xi} - 1 - i t xi 1_{t <= r}) w(t) dt
//
// pieces: analytic series below 2^-40; oscillation-resolved adaptive GK on
// [2^-40, Y]; plain GK of -(1 + i t xi chi) w on [Y, 2^40]; boundary term of the
// remaining \int e^{i t xi} w from one integration by parts; fitted power tail
// beyond. Y is chosen so the discarded oscillatory remainder fits the budget.

struct HalfDensity {
  std::function<double(double)> w;  // evaluated at t > 0
  double sing_order = 0.0;
  std::vector<double> breakpoints;
  std::optional<double> exact_sing_coef;
  std::optional<double> exact_tail_coef;
  std::optional<double> exact_tail_order;

  WeightedDensity1D view() const {
    WeightedDensity1D v;
    v.density = w;
    v.sing_order = sing_order;
    v.breakpoints = breakpoints;
    v.exact_sing_coef = exact_sing_coef;
    v.exact_tail_coef = exact_tail_coef;
    v.exact_tail_order = exact_tail_order;
    return v;
  }
};

HalfDensity side_view(const WeightedDensity1D& w, int sign) {
  HalfDensity hd;
  auto dens = w.density;
  if (sign > 0)
    hd.w = [dens](double t) { return dens(t); };
  else
    hd.w = [dens](double t) { return dens(-t); };
  hd.sing_order = w.sing_order;
  hd.breakpoints = w.breakpoints;
  hd.exact_sing_coef = w.exact_sing_coef;
  hd.exact_tail_coef = w.exact_tail_coef;
  hd.exact_tail_order = w.exact_tail_order;
  return hd;
}

// Crude magnitude reference \int min(2 + min(t,r)|xi|, (t xi)^2/2) w dt used to set a
// relative error budget; it upper-bounds |I| and tracks its growth in |xi|.
double magnitude_reference(const HalfDensity& hd, double axi, double r, long& evals) {
  Engine eng;
  std::function<Cplx(double)> f = [&](double t) -> Cplx {
    const double u = t * axi;
    const double cap = 2.0 + std::min(t, r) * axi;
    return {std::min(0.5 * u * u, cap) * hd.w(t), 0.0};
  };
  eng.f = &f;
  const auto edges = shell_edges(kShellInnerEdge, kShellOuterEdge, hd.breakpoints);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (density_max3(hd.w, edges[i], edges[i + 1]) == 0.0) continue;
    eng.push(edges[i], edges[i + 1], 0);
  }
  evals += eng.evals;
  double v = std::abs(eng.value);
  const PowerLawFit in = fit_inner_power_law(hd.view());
  v += 0.5 * axi * axi * inner_moment(in, 2);
  return v;
}

struct TailChoice {
  double y = 0.0;       // start of the analytic tail (power of two)
  bool zero = false;    // density vanishes from y on
  bool usable = false;  // remainder bound met the budget
};

// Remainder of \int_Y^inf e^{i t xi} w dt after removing the boundary term: a second
// van der Corput pass gives 2 |w'(Y)| / xi^2 for eventually monotone w.
double osc_tail_residual(double wY, double order, double y, double axi) {
  const double wprime = wY * std::max(std::abs(order), 1.0) / y;
  return 2.0 * wprime / (axi * axi);
}

TailChoice choose_tail_start(const std::function<double(double)>& w, double axi,
                             double maxbp, double budget,
                             const std::function<double(double, double, double)>& residual) {
  TailChoice tc;
  const double y0 = std::max(32.0 / axi, 4.0 * kShellInnerEdge);
  double y = std::ldexp(1.0, static_cast<int>(std::ceil(std::log2(y0))));
  const double ycap = std::ldexp(1.0, 200);
  for (; y <= ycap; y *= 2.0) {
    if (y < maxbp) continue;
    const double w1 = w(y), w2 = w(2.0 * y), w4 = w(4.0 * y);
    if (w1 == 0.0 && w2 == 0.0 && w4 == 0.0) {
      tc.y = y;
      tc.zero = true;
      tc.usable = true;
      return tc;
    }
    if (w1 == 0.0 || w2 > w1 || w4 > w2) continue;  // need decreasing evidence
    const double order = std::log2(w1 / std::max(w2, 1e-300));
    if (residual(y, w1, order) <= 0.25 * budget) {
      tc.y = y;
      tc.usable = true;
      return tc;
    }
  }
  tc.y = kShellOuterEdge;
  return tc;
}

struct HalfResult {
  Cplx value{0.0, 0.0};
  double err = 0.0;
  double ref = 0.0;
  long evals = 0;
};

HalfResult lk_halfline(const HalfDensity& hd, double xi, double cutoff_radius,
                       const QuadOptions& opt, double rel_tol, bool compensator_in_ref) {
  HalfResult out;
  if (xi == 0.0) return out;
  const double axi = std::abs(xi);
  const double r = cutoff_radius;

  // For a symmetric pair the compensator cancels, so it must not inflate the scale.
  const double ref = magnitude_reference(hd, axi, compensator_in_ref ? r : 0.0, out.evals);
  out.ref = ref;
  const double budget = std::max(opt.abs_tol, rel_tol * ref * 0.25);
  const double yinner = inner_edge_for(axi);

  // inner series tail below the (possibly extended) inner edge
  const PowerLawFit infit = fit_inner_power_law(hd.view());
  {
    Cplx corr{0.0, 0.0};
    const Cplx iu{0.0, xi};
    Cplx pw = iu * iu;
    double fact = 2.0;
    for (int m = 2; m <= 5; ++m) {
      corr += pw / fact * inner_moment_at(infit, m, yinner);
      pw *= iu;
      fact *= (m + 1.0);
    }
    out.value += corr;
    out.err += std::pow(axi, 6.0) / 720.0 * inner_moment_at(infit, 6, yinner) +
               infit.rel_uncertainty * std::abs(corr);
  }

  double maxbp = 0.0;
  for (double b : hd.breakpoints) maxbp = std::max(maxbp, b);
  auto resid_fn = [axi](double y, double wY, double order) {
    return osc_tail_residual(wY, order, y, axi);
  };
  const TailChoice tc = choose_tail_start(hd.w, axi, maxbp, budget, resid_fn);
  const double ystar = tc.y;
  const PowerLawFit outfit = fit_outer_power_law(hd.view());

  // region I: oscillation-resolved adaptive GK on [2^-40, ystar]
  {
    Engine eng;
    eng.osc_scale = axi;
    std::function<Cplx(double)> f = [&](double t) {
      return oscillatory_core(t * xi, t <= r) * hd.w(t);
    };
    eng.f = &f;
    std::vector<double> bps = hd.breakpoints;
    bps.push_back(r);
    const auto edges = shell_edges(yinner, ystar, bps);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const double a = edges[i], b = edges[i + 1];
      if (density_max3(hd.w, a, b) == 0.0) continue;
      const double ub = b * axi;
      const double gmax = std::min(0.5 * ub * ub, 2.0 + (a < r ? std::min(ub, r * axi) : 0.0));
      const double bound = gmax * density_int3(hd.w, a, b) * 1.5;
      if (bound < budget * 1e-5) {
        eng.add_external({0.0, 0.0}, bound);
        continue;
      }
      const double want = (b - a) * axi / kPi;
      const int pieces = want > 1.0 ? static_cast<int>(std::min(256.0, std::ceil(want))) : 1;
      const double step = (b - a) / pieces;
      for (int p = 0; p < pieces; ++p) eng.push(a + p * step, a + (p + 1) * step, 0);
    }
    eng.refine(0.5 * budget, opt.max_intervals);
    out.value += eng.value;
    out.err += eng.err;
    out.evals += eng.evals;
  }

  if (tc.zero) return out;  // nothing beyond ystar

  // region II: -(1 + i t xi chi) w integrated plainly on [ystar, 2^40]
  if (ystar < kShellOuterEdge) {
    Engine eng;
    std::function<Cplx(double)> f = [&](double t) {
      return Cplx{1.0, t <= r ? t * xi : 0.0} * hd.w(t);
    };
    eng.f = &f;
    std::vector<double> bps = hd.breakpoints;
    bps.push_back(r);
    const auto edges = shell_edges(ystar, kShellOuterEdge, bps);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      if (density_max3(hd.w, edges[i], edges[i + 1]) == 0.0) continue;
      eng.push(edges[i], edges[i + 1], 0);
    }
    eng.refine(0.25 * budget, opt.max_intervals);
    out.value -= eng.value;
    out.err += eng.err;
    out.evals += eng.evals;
  }

  // fitted -1 mass beyond max(ystar, 2^40)
  {
    const double mass = tail_mass_from(outfit, std::max(ystar, kShellOuterEdge));
    out.value -= mass;
    out.err += outfit.rel_uncertainty * mass;
  }

  if (tc.usable) {
    // boundary term: \int_ystar^inf e^{i t xi} w dt = -w(Y) e^{iY xi}/(i xi) + R
    const double wY = hd.w(ystar);
    if (wY > 0.0) {
      const Cplx ixi{0.0, xi};
      const Cplx phase{std::cos(ystar * xi), std::sin(ystar * xi)};
      out.value += -wY * phase / ixi;
      const double order = std::log2(wY / std::max(hd.w(2.0 * ystar), 1e-300));
      out.err += osc_tail_residual(wY, order, ystar, axi);
    }
  } else {
    // no usable analytic tail; the oscillatory remainder is reported as error
    out.err += 2.0 * tail_mass_from(outfit, kShellOuterEdge);
  }
  return out;
}

}  // namespace

QuadResult levy_khinchine_integral_1d(const WeightedDensity1D& w, double xi,
                                      double cutoff_radius, const QuadOptions& opt) {
  if (w.sing_order >= 3.0)
    throw IntegrabilityError("declared singularity order " + std::to_string(w.sing_order) +
                             " >= 3 is not a Levy density in d = 1");
  const double rel_tol = 1e-9;
  QuadResult res;
  if (xi == 0.0) return res;

  const HalfResult pos =
      lk_halfline(side_view(w, +1), xi, cutoff_radius, opt, rel_tol, !w.symmetric);
  double ref = pos.ref;
  if (w.symmetric) {
    // the mirror side is the complex conjugate of the positive side
    res.value = 2.0 * pos.value.real();
    res.abs_error = 2.0 * pos.err;
    res.evaluations = pos.evals;
    ref *= 2.0;
  } else {
    const HalfResult neg =
        lk_halfline(side_view(w, -1), -xi, cutoff_radius, opt, rel_tol, true);
    res.value = pos.value + neg.value;
    res.abs_error = pos.err + neg.err;
    res.evaluations = pos.evals + neg.evals;
    ref += neg.ref;
  }
  if (!std::isfinite(res.abs_error) || !std::isfinite(std::abs(res.value)))
    throw QuadratureError("jump integral produced non-finite values", res.abs_error);
  const double allowed =
      std::max(opt.abs_tol, rel_tol * std::max(std::abs(res.value), 0.1 * ref)) * 4.0;
  if (res.abs_error > allowed)
    throw QuadratureError("jump integral did not converge: error estimate " +
                              std::to_string(res.abs_error) + " exceeds tolerance " +
                              std::to_string(allowed),
                          res.abs_error);
  return res;
}

namespace {

double lambda_minus_one(int dim, double u) {
  // Lambda_d(u) - 1 with Lambda = cos, J_0, sinc for d = 1, 2, 3
  const double au = std::abs(u);
  if (au < kSeriesThreshold) {
    const double u2 = u * u;
    const double d = dim;
    return -u2 / (2.0 * d) + u2 * u2 / (8.0 * d * (d + 2.0));
  }
  switch (dim) {
    case 1: {
      const double s = std::sin(0.5 * u);
      return -2.0 * s * s;
    }
    case 2:
      return std::cyl_bessel_j(0.0, au) - 1.0;
    default:
      return std::sin(au) / au - 1.0;
  }
}

double surface_measure(int dim) {
  switch (dim) {
    case 1:
      return 2.0;
    case 2:
      return 2.0 * kPi;
    default:
      return 4.0 * kPi;
  }
}

double envelope(int dim, double u) {
  // decay of |Lambda_d| for large argument
  if (dim == 1) return 1.0;
  if (dim == 2) return std::min(1.0, std::sqrt(2.0 / (kPi * u)));
  return std::min(1.0, 1.0 / u);
}

}  // namespace

QuadResult levy_khinchine_integral_radial(const WeightedDensity1D& profile, int dim,
                                          double xi_norm, const QuadOptions& opt) {
  if (dim < 1 || dim > 3)
    throw ValidationError("radial jump integrals support dimensions 1..3 only");
  QuadResult res;
  if (xi_norm == 0.0) return res;
  const double surf = surface_measure(dim);
  const double axi = xi_norm;

  // weight on the radius: profile(r) * r^{d-1}
  WeightedDensity1D w;
  {
    auto prof = profile.density;
    const int d = dim;
    w.density = [prof, d](double t) { return prof(t) * std::pow(t, d - 1); };
    w.sing_order = profile.sing_order - (dim - 1);
    w.breakpoints = profile.breakpoints;
    if (profile.exact_sing_coef) w.exact_sing_coef = *profile.exact_sing_coef;
    if (profile.exact_tail_coef && profile.exact_tail_order) {
      w.exact_tail_coef = *profile.exact_tail_coef;
      w.exact_tail_order = *profile.exact_tail_order - (dim - 1);
    }
  }
  if (w.sing_order >= 3.0)
    throw IntegrabilityError("radial profile too singular at 0 for a Levy measure");
  const HalfDensity hd = side_view(w, +1);

  long pre_evals = 0;
  const double ref = surf * 0.5 * magnitude_reference(hd, axi, 0.0, pre_evals);
  const double budget = std::max(opt.abs_tol, 1e-9 * ref * 0.25);
  res.evaluations += pre_evals;

  double value = 0.0;
  double err = 0.0;
  const double yinner = inner_edge_for(axi);

  // inner series
  const PowerLawFit infit = fit_inner_power_law(w);
  {
    const double dd = dim;
    const double m2 = inner_moment_at(infit, 2, yinner);
    const double m4 = inner_moment_at(infit, 4, yinner);
    const double c2 = -axi * axi / (2.0 * dd);
    const double c4 = std::pow(axi, 4.0) / (8.0 * dd * (dd + 2.0));
    value += surf * (c2 * m2 + c4 * m4);
    err += surf * std::pow(axi, 6.0) / (48.0 * dd * (dd + 2.0) * (dd + 4.0)) *
               inner_moment_at(infit, 6, yinner) +
           infit.rel_uncertainty * std::abs(surf * c2 * m2);
  }

  double maxbp = 0.0;
  for (double b : w.breakpoints) maxbp = std::max(maxbp, b);
  auto resid_fn = [axi, surf, dim](double y, double wY, double) {
    return surf * envelope(dim, y * axi) * 2.0 * wY / axi;
  };
  const TailChoice tc = choose_tail_start(hd.w, axi, maxbp, budget, resid_fn);
  const double ystar = tc.y;
  const PowerLawFit outfit = fit_outer_power_law(w);

  // oscillation-resolved region [2^-40, ystar]
  {
    Engine eng;
    std::function<Cplx(double)> f = [&](double t) {
      return Cplx{surf * lambda_minus_one(dim, t * axi) * hd.w(t), 0.0};
    };
    eng.f = &f;
    const auto edges = shell_edges(yinner, ystar, w.breakpoints);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const double a = edges[i], b = edges[i + 1];
      if (density_max3(hd.w, a, b) == 0.0) continue;
      const double ub = b * axi;
      const double gmax = surf * std::min(0.5 * ub * ub, 2.0);
      const double bound = gmax * density_int3(hd.w, a, b) * 1.5;
      if (bound < budget * 1e-5) {
        eng.add_external({0.0, 0.0}, bound);
        continue;
      }
      const double want = (b - a) * axi / kPi;
      const int pieces = want > 1.0 ? static_cast<int>(std::min(256.0, std::ceil(want))) : 1;
      const double step = (b - a) / pieces;
      for (int p = 0; p < pieces; ++p) eng.push(a + p * step, a + (p + 1) * step, 0);
    }
    eng.refine(0.5 * budget, opt.max_intervals);
    value += eng.value.real();
    err += eng.err;
    res.evaluations += eng.evals;
  }

  if (!tc.zero) {
    // the "-1" part beyond ystar, integrated plainly then extended by the fit
    if (ystar < kShellOuterEdge) {
      Engine eng;
      std::function<Cplx(double)> f = [&](double t) { return Cplx{hd.w(t), 0.0}; };
      eng.f = &f;
      const auto edges = shell_edges(ystar, kShellOuterEdge, w.breakpoints);
      for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (density_max3(hd.w, edges[i], edges[i + 1]) == 0.0) continue;
        eng.push(edges[i], edges[i + 1], 0);
      }
      eng.refine(0.25 * budget, opt.max_intervals);
      value -= surf * eng.value.real();
      err += surf * eng.err;
      res.evaluations += eng.evals;
    }
    const double mass = tail_mass_from(outfit, std::max(ystar, kShellOuterEdge));
    value -= surf * mass;
    err += surf * outfit.rel_uncertainty * mass;
    if (tc.usable) {
      err += surf * envelope(dim, ystar * axi) * 2.0 * hd.w(ystar) / axi;
    } else {
      err += 2.0 * surf * tail_mass_from(outfit, kShellOuterEdge);
    }
  }

  res.value = value;
  res.abs_error = err;
  if (!std::isfinite(err) || !std::isfinite(value))
    throw QuadratureError("radial jump integral produced non-finite values", err);
  const double allowed =
      std::max(opt.abs_tol, 1e-9 * std::max(std::abs(value), 0.1 * ref)) * 4.0;
  if (err > allowed)
    throw QuadratureError("radial jump integral did not converge: error " +
                              std::to_string(err) + " exceeds " + std::to_string(allowed),
                          err);
  return res;
}

double first_moment_in_band(const WeightedDensity1D& w, double lo, double hi,
                            const QuadOptions& opt, double* abs_err) {
  if (w.symmetric || !(hi > lo)) return 0.0;
  std::vector<double> bps;
  if (lo > kShellInnerEdge && lo < kShellOuterEdge) bps.push_back(lo);
  if (hi > kShellInnerEdge && hi < kShellOuterEdge) bps.push_back(hi);
  auto g = [lo, hi](double y) -> Cplx {
    const double ay = std::abs(y);
    return (ay >= lo && ay <= hi) ? Cplx{y, 0.0} : Cplx{0.0, 0.0};
  };
  QuadResult r = integrate_shells(g, w, true, true, 0.0, bps, opt);
  if (abs_err) *abs_err += r.abs_error;
  return r.value.real();
}

}  // namespace symindex
