#include "symindex/cogarch.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>

#include "symindex/errors.hpp"
#include "symindex/jump_kernel.hpp"

namespace symindex {

namespace {

const QuadOptions kTight{1e-12, 40000};

WeightedDensity1D side_restricted(const WeightedDensity1D& w, int s) {
  WeightedDensity1D out = w;
  auto d = w.density;
  out.density = [d, s](double u) { return d(s * u); };
  return out;
}

double log_jump(double lod, double w) { return std::log1p(lod * w * w); }

// \int_0^edge u^m fit du for the power-law extrapolation of the density below the
// dyadic range.
double fit_moment(const PowerLawFit& fit, int m, double edge) {
  if (fit.zero) return 0.0;
  const double p = static_cast<double>(m) + 1.0 - fit.order;
  if (p <= 0.0)
    throw IntegrabilityError("driver density too singular at 0 for moment " +
                             std::to_string(m));
  return fit.coef * std::pow(edge, p) / p;
}

// w -> (w, log1p(lod w^2)) moments over a band in |w|, one shell sweep for both.
struct BandMoments {
  double w = 0.0, logsq = 0.0, err = 0.0;
  long evals = 0;
};

BandMoments band_moments(const WeightedDensity1D& dens, double lod, double lo, double hi,
                         const QuadOptions& opt) {
  std::vector<double> bps;
  if (lo > kShellInnerEdge && lo < kShellOuterEdge) bps.push_back(lo);
  if (hi > kShellInnerEdge && hi < kShellOuterEdge) bps.push_back(hi);
  auto g = [lod, lo, hi](double w) -> Cplx {
    const double aw = std::abs(w);
    if (aw < lo || aw > hi) return {0.0, 0.0};
    return {w, log_jump(lod, w)};
  };
  QuadResult r = integrate_shells(g, dens, true, true, 0.0, bps, opt);
  return {r.value.real(), r.value.imag(), r.abs_error, r.evaluations};
}

// Threshold in |w| below which the image point (e^{v/2} w, log1p(lod w^2)) stays inside
// the ball of radius rc. Both squared coordinates grow in |w|, so it is unique.
double ball_threshold(double ev, double lod, double rc) {
  if (lod == 0.0) return rc / std::sqrt(ev);
  const double target = rc * rc;
  double hi = rc / std::sqrt(ev);
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double l = log_jump(lod, mid);
    if (ev * mid * mid + l * l >= target)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Compensated phase integral over one side of (0, edge], where the shell range ends.
// Descends by octaves while the phase is too large for the series, then closes with
// the power-law fit. as = signed linear phase slope on this side.
Cplx inner_block(const std::function<double(double)>& density, const PowerLawFit& fit,
                 int s, double as, double b, double lod, double edge, double* err,
                 long* evals) {
  const double btilde = b * lod;
  Cplx total{0.0, 0.0};
  double edge2 = edge;
  auto phi_bound = [&](double u) { return std::abs(as) * u + std::abs(btilde) * u * u; };
  auto f = [&](double u) -> Cplx {
    const double phi = as * u + b * log_jump(lod, u);
    return oscillatory_core(phi, true) * density(s * u);
  };
  long spent = 0;
  while (phi_bound(edge2) > 0.01) {
    const double lo = 0.5 * edge2, hi = edge2;
    const double dphi = std::abs(as) + 2.0 * std::abs(btilde) * hi;
    long panels = static_cast<long>((hi - lo) * dphi / 2.0) + 16;
    panels = std::min(panels, 200000L);
    panels += panels % 2;
    spent += 3 * panels;
    if (spent > 3000000L)
      throw QuadratureError("phase oscillates too fast below the shell range", 1.0);
    // composite Simpson, coarse half fused for the error estimate
    Cplx fine{0.0, 0.0}, coarse{0.0, 0.0};
    const double h = (hi - lo) / static_cast<double>(2 * panels);
    Cplx prev = f(lo);
    for (long i = 0; i < panels; ++i) {
      const Cplx m = f(lo + (2 * i + 1) * h);
      const Cplx nxt = f(lo + (2 * i + 2) * h);
      fine += (prev + 4.0 * m + nxt) * (h / 3.0);
      if (i % 2 == 0) {
        const Cplx nxt2 = i + 1 < panels ? f(lo + (2 * i + 4) * h) : nxt;
        coarse += (prev + 4.0 * nxt + nxt2) * (2.0 * h / 3.0);
      }
      prev = nxt;
    }
    total += fine;
    *err += std::abs(fine - coarse) / 15.0 + 1e-320;
    edge2 = lo;
  }
  if (evals) *evals += spent;
  if (fit.zero) return total;
  const double i2 = fit_moment(fit, 2, edge2);
  const double i3 = fit_moment(fit, 3, edge2);
  const double i4 = fit_moment(fit, 4, edge2);
  const Cplx c2{-0.5 * as * as, 0.0};
  const Cplx c3{-as * btilde, -as * as * as / 6.0};
  const Cplx c4{-0.5 * btilde * btilde + as * as * as * as / 24.0, -0.5 * as * as * btilde};
  const Cplx val = c2 * i2 + c3 * i3 + c4 * i4;
  const double absval = std::abs(c2) * i2 + std::abs(c3) * i3 + std::abs(c4) * i4;
  *err += phi_bound(edge2) * std::abs(c4) * i4 + fit.rel_uncertainty * std::abs(val) +
          lod * edge2 * edge2 * absval;
  return total + val;
}

}  // namespace

void validate_cogarch(const CogarchParams& p) {
  validate_triplet(p.driver);
  if (p.driver.dim != 1)
    throw ValidationError("cogarch driver must be one-dimensional");
  if (!(p.delta > 0.0) || !(p.delta < 1.0))
    throw ValidationError("cogarch delta must lie in (0, 1), got " +
                          std::to_string(p.delta));
  if (!(p.beta > 0.0) || !std::isfinite(p.beta))
    throw ValidationError("cogarch beta must be positive");
  if (!(p.lambda >= 0.0) || !std::isfinite(p.lambda))
    throw ValidationError("cogarch lambda must be >= 0");
  if (p.lambda / p.delta > 1e20)
    throw ValidationError("cogarch lambda/delta too large for the integration range");
  if (!std::holds_alternative<NoJumps>(p.driver.jumps.v) &&
      !kernel_density_1d(p.driver.jumps))
    throw ValidationError("cogarch driver jump kernel must expose a scalar density");
}

CogarchEvaluator::CogarchEvaluator(CogarchParams p, bool build_moments)
    : p_(std::move(p)) {
  validate_cogarch(p_);
  dens_ = kernel_density_1d(p_.driver.jumps);
  if (!dens_) return;

  fit_pos_ = fit_inner_power_law(side_restricted(*dens_, +1));
  fit_neg_ = dens_->symmetric ? fit_pos_ : fit_inner_power_law(side_restricted(*dens_, -1));
  const PowerLawFit out_pos = fit_outer_power_law(side_restricted(*dens_, +1));
  const PowerLawFit out_neg =
      dens_->symmetric ? out_pos : fit_outer_power_law(side_restricted(*dens_, -1));
  if (!out_pos.zero || !out_neg.zero) {
    heavy_tail_ = true;
    tail_mass_ = (out_pos.zero ? 0.0 : outer_tail_mass(out_pos)) +
                 (out_neg.zero ? 0.0 : outer_tail_mass(out_neg));
  }
  if (heavy_tail_ || !build_moments) return;

  const double lod = p_.lambda / p_.delta;
  auto mom = std::make_shared<CogarchMoments>();
  auto entry = [&](int j, int k, bool absolute) -> double {
    if (lod == 0.0 && k > 0) return 0.0;
    if (!absolute && dens_->symmetric && j % 2 == 1) return 0.0;
    auto g = [j, k, lod, absolute](double w) -> Cplx {
      double p = 1.0;
      const double base = absolute ? std::abs(w) : w;
      for (int i = 0; i < j; ++i) p *= base;
      const double l = log_jump(lod, w);
      for (int i = 0; i < k; ++i) p *= l;
      return {p, 0.0};
    };
    QuadResult r = integrate_shells(g, *dens_, true, true, 0.0, {}, kTight);
    mom->err += r.abs_error;
    return r.value.real();
  };
  mom->m20 = entry(2, 0, false);
  mom->m11 = entry(1, 1, false);
  mom->m02 = entry(0, 2, false);
  mom->m30 = entry(3, 0, false);
  mom->m21 = entry(2, 1, false);
  mom->m12 = entry(1, 2, false);
  mom->m03 = entry(0, 3, false);
  mom->m40 = entry(4, 0, false);
  mom->m31 = entry(3, 1, false);
  mom->m22 = entry(2, 2, false);
  mom->m13 = entry(1, 3, false);
  mom->m04 = entry(0, 4, false);
  mom->a40 = mom->m40;
  mom->a31 = entry(3, 1, true);
  mom->a22 = mom->m22;
  mom->a13 = entry(1, 3, true);
  mom->a04 = mom->m04;
  // mass below the inner shell edge, bounded through the power-law fits
  mom->err += 16.0 * (fit_moment(fit_pos_, 2, kShellInnerEdge) +
                      fit_moment(fit_neg_, 2, kShellInnerEdge));
  moments_ = std::move(mom);
}

CogarchPrepared CogarchEvaluator::prepare(double v, const QuadOptions& opt) const {
  if (!std::isfinite(v) || std::abs(v) > kCogarchMaxAbsV)
    throw NumericError("cogarch log-volatility " + std::to_string(v) +
                       " outside the overflow guard |v| <= " +
                       std::to_string(kCogarchMaxAbsV));
  CogarchPrepared st;
  st.beta = p_.beta;
  st.lambda = p_.lambda;
  st.delta = p_.delta;
  st.lod = p_.lambda / p_.delta;
  st.v = v;
  st.ev = std::exp(v);
  st.ev2 = std::exp(0.5 * v);
  st.lz = p_.driver.drift.empty() ? 0.0 : p_.driver.drift[0];
  st.qz = p_.driver.diffusion.empty() ? 0.0 : p_.driver.diffusion[0][0];
  st.rz = p_.driver.cutoff.radius;
  st.r1 = 1.0 / st.ev2;
  st.r2 = st.lod > 0.0 ? std::sqrt(std::expm1(1.0) / st.lod)
                       : std::numeric_limits<double>::infinity();
  st.rmin = std::min(st.r1, st.r2);
  st.dens = dens_;
  st.fit_pos = fit_pos_;
  st.fit_neg = fit_neg_;
  st.heavy_tail = heavy_tail_;
  st.tail_mass = tail_mass_;
  st.moments = moments_;

  QuadOptions tight{std::min(kTight.abs_tol, 0.01 * opt.abs_tol), opt.max_intervals};
  double cut_adjust = 0.0;
  double log_rate = 0.0;
  if (dens_) {
    if (!dens_->symmetric && st.rmin != st.rz) {
      const double lo = std::min(st.rmin, st.rz), hi = std::max(st.rmin, st.rz);
      BandMoments bm = band_moments(*dens_, st.lod, lo, hi, tight);
      cut_adjust = (st.rmin > st.rz ? 1.0 : -1.0) * bm.w;
      st.err1 = st.ev2 * bm.err;
    }
    if (st.lod > 0.0) {
      BandMoments bm = band_moments(*dens_, st.lod, 0.0, st.rmin, tight);
      log_rate = bm.logsq +
                 st.lod * (fit_moment(fit_pos_, 2, kShellInnerEdge) +
                           fit_moment(fit_neg_, 2, kShellInnerEdge));
      st.err2 = bm.err;
    }
    if (moments_) {
      BandMoments bm = band_moments(*dens_, st.lod, st.rmin,
                                    std::numeric_limits<double>::infinity(), tight);
      st.t1 = dens_->symmetric ? 0.0 : bm.w;
      st.t2 = st.lod > 0.0 ? bm.logsq : 0.0;
      st.t_err = bm.err;
    }
  }
  st.drift1 = st.ev2 * (st.lz + cut_adjust);
  st.drift2 = st.beta / st.ev + std::log(st.delta) + log_rate;
  st.diff = st.ev * st.qz;
  return st;
}

QuadResult cogarch_jump_integral(const CogarchPrepared& st, double xi1, double xi2,
                                 double w_star, const QuadOptions& opt) {
  if (!st.dens) return {};
  const double a = st.ev2 * xi1;
  const double b = xi2;

  if (w_star == st.rmin && st.moments) {
    const auto& m = *st.moments;
    const double aa = std::abs(a), ab = std::abs(b);
    const double s4abs = aa * aa * aa * aa * m.a40 + 4.0 * aa * aa * aa * ab * m.a31 +
                         6.0 * aa * aa * ab * ab * m.a22 + 4.0 * aa * ab * ab * ab * m.a13 +
                         ab * ab * ab * ab * m.a04;
    const double fast_err = s4abs / 12.0 + m.err + st.t_err * (aa + ab);
    if (fast_err <= 0.25 * opt.abs_tol) {
      const double s2 = a * a * m.m20 + 2.0 * a * b * m.m11 + b * b * m.m02;
      const double s3 = a * a * a * m.m30 + 3.0 * a * a * b * m.m21 +
                        3.0 * a * b * b * m.m12 + b * b * b * m.m03;
      const double s4 = a * a * a * a * m.m40 + 4.0 * a * a * a * b * m.m31 +
                        6.0 * a * a * b * b * m.m22 + 4.0 * a * b * b * b * m.m13 +
                        b * b * b * b * m.m04;
      const Cplx val{-0.5 * s2 + s4 / 24.0, -s3 / 6.0 + a * st.t1 + b * st.t2};
      return {val, fast_err, 0};
    }
  }

  if (w_star <= 2.0 * kShellInnerEdge)
    throw NumericError("cogarch compensation threshold below the integration range");
  if (st.heavy_tail && w_star >= kShellOuterEdge)
    throw NumericError(
        "cogarch state pushes the compensation threshold beyond the integration range "
        "for a heavy-tailed driver");

  const double lod = st.lod;
  const double osc = std::abs(a) + std::abs(b) * std::sqrt(lod);
  std::vector<double> bps{w_star};
  auto g = [a, b, lod, w_star](double w) -> Cplx {
    const double phi = a * w + b * log_jump(lod, w);
    return oscillatory_core(phi, std::abs(w) < w_star);
  };

  // A heavy power tail oscillates against e^{iaw} over far too many periods to
  // resolve. Cut the adaptive region at Y and evaluate [Y, outer edge] by one
  // integration by parts of e^{ibL} dens against e^{iaw}; the discarded remainder
  // is bounded via |d/dw (e^{ibL} dens)| <= (2|b| + sigma) dens / w.
  double tail_cut = kShellOuterEdge;
  const double aa = std::abs(a);
  if (st.heavy_tail && aa > 1.2e-8) {
    if (!st.dens->exact_tail_coef || !st.dens->exact_tail_order)
      throw NumericError(
          "cogarch with a heavy-tailed driver needs an exact power-law tail "
          "declaration on the jump density");
    const double sig = *st.dens->exact_tail_order;
    const double cc = *st.dens->exact_tail_coef;
    const double target = 0.05 * std::max(opt.abs_tol, 1e-12) * sig * aa /
                          ((2.0 * std::abs(b) + sig) * cc);
    tail_cut = std::pow(target, -1.0 / sig);
    tail_cut = std::clamp(tail_cut, std::max(w_star, 1.0) * 1.0000001, kShellOuterEdge);
  }

  Cplx value{0.0, 0.0};
  double err = 0.0;
  long evals = 0;
  if (tail_cut >= kShellOuterEdge) {
    QuadResult core = integrate_shells(g, *st.dens, true, true, osc, bps, opt);
    value = core.value;
    err = core.abs_error;
    evals = core.evaluations;
  } else {
    const double sig = *st.dens->exact_tail_order;
    const double cc = *st.dens->exact_tail_coef;
    const double yc = tail_cut;
    bps.push_back(yc);
    WeightedDensity1D masked = *st.dens;
    auto base = st.dens->density;
    masked.density = [base, yc](double w) { return std::abs(w) <= yc ? base(w) : 0.0; };
    masked.exact_tail_coef.reset();
    masked.exact_tail_order.reset();
    QuadResult core = integrate_shells(g, masked, true, true, osc, bps, opt);
    value = core.value;
    err = core.abs_error;
    evals = core.evaluations;
    // -1 part of the tail, plain and non-oscillatory, with the true density
    auto gm = [yc](double w) -> Cplx {
      return std::abs(w) >= yc ? Cplx{1.0, 0.0} : Cplx{0.0, 0.0};
    };
    QuadResult mass = integrate_shells(gm, *st.dens, true, true, 0.0, bps, opt);
    value -= mass.value;
    err += mass.abs_error;
    evals += mass.evaluations;
    // boundary terms of the e^{i phi} part per side
    for (int s = -1; s <= 1; s += 2) {
      const double as = s * a;
      const Cplx ia{0.0, as};
      const Cplx ey = std::exp(Cplx(0.0, b * log_jump(lod, yc))) * base(s * yc);
      value -= ey * Cplx{std::cos(as * yc), std::sin(as * yc)} / ia;
      err += base(s * kShellOuterEdge) / aa +
             (2.0 * std::abs(b) + sig) * cc * std::pow(yc, -sig) / (sig * aa);
    }
  }
  value += inner_block(st.dens->density, st.fit_pos, +1, a, b, lod, kShellInnerEdge, &err,
                       &evals);
  value += inner_block(st.dens->density, st.fit_neg, -1, -a, b, lod, kShellInnerEdge, &err,
                       &evals);
  err += 2.0 * st.tail_mass;
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()) ||
      err > 4.0 * std::max(opt.abs_tol, 1e-9 * std::abs(value)))
    throw QuadratureError("cogarch jump integral did not converge", err);
  return {value, err, evals};
}

SymbolValue CogarchEvaluator::eval(const CogarchPrepared& st, std::span<const double> xi,
                                   const QuadOptions& opt, double* abs_err) {
  if (xi.size() != 2)
    throw ValidationError("cogarch symbol takes a 2-dimensional argument");
  QuadResult jump = cogarch_jump_integral(st, xi[0], xi[1], st.rmin, opt);
  const Cplx p = Cplx{0.5 * st.diff * xi[0] * xi[0],
                      -(st.drift1 * xi[0] + st.drift2 * xi[1])} -
                 jump.value;
  if (abs_err)
    *abs_err = jump.abs_error + std::abs(xi[0]) * st.err1 + std::abs(xi[1]) * st.err2;
  return SymbolValue::from(p);
}

LevyTriplet CogarchEvaluator::characteristics(double v, const CutoffFunction& chi,
                                              const QuadOptions& opt) const {
  chi.validate();
  CogarchPrepared st = prepare(v, opt);
  LevyTriplet t;
  t.dim = 2;
  t.cutoff = chi;
  double jw = 0.0, jl = 0.0;
  if (dens_) {
    const double wball = ball_threshold(st.ev, st.lod, chi.radius);
    if (wball <= 2.0 * kShellInnerEdge)
      throw NumericError("cut-off radius too small for this volatility level");
    if (wball != st.rmin) {
      const double lo = std::min(wball, st.rmin), hi = std::max(wball, st.rmin);
      QuadOptions tight{std::min(kTight.abs_tol, 0.01 * opt.abs_tol), opt.max_intervals};
      BandMoments bm = band_moments(*dens_, st.lod, lo, hi, tight);
      const double sign = wball > st.rmin ? 1.0 : -1.0;
      jw = sign * bm.w;
      jl = sign * bm.logsq;
    }
  }
  t.drift = {st.drift1 + st.ev2 * jw, st.drift2 + jl};
  t.diffusion = {{st.diff, 0.0}, {0.0, 0.0}};
  if (dens_) {
    OpaqueKernel img;
    img.dim = 2;
    img.integral = [st](std::span<const double> xi, const CutoffFunction& c,
                        const QuadOptions& o) -> QuadResult {
      if (xi.size() != 2)
        throw ValidationError("cogarch image kernel takes a 2-dimensional argument");
      const double ws = ball_threshold(st.ev, st.lod, c.radius);
      return cogarch_jump_integral(st, xi[0], xi[1], ws, o);
    };
    t.jumps = JumpKernel{img};
  }
  return t;
}

SymbolValue cogarch_symbol(const CogarchParams& p, double g, double v,
                           std::span<const double> xi, const QuadOptions& opt,
                           double* abs_err) {
  (void)g;
  CogarchEvaluator ev(p, false);
  return CogarchEvaluator::eval(ev.prepare(v, opt), xi, opt, abs_err);
}

}  // namespace symindex
