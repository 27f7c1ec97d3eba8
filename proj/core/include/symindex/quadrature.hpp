#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "symindex/types.hpp"

namespace symindex {

// Dyadic integration range shared by all jump integrals: shells 2^k <= |y| < 2^{k+1}
// spanning [2^-40, 2^40]. Mass outside is handled analytically (series below the inner
// edge, fitted power-law tail beyond the outer edge).
inline constexpr double kShellInnerEdge = 0x1.0p-40;
inline constexpr double kShellOuterEdge = 0x1.0p40;
inline constexpr int kShellCount = 80;

// Below this value of |y * xi| the oscillatory integrands switch to their series
// expansion to avoid cancellation.
inline constexpr double kSeriesThreshold = 1e-4;

struct QuadOptions {
  double abs_tol = 1e-8;
  int max_intervals = 40000;
};

// One-dimensional weight (Levy density w.r.t. Lebesgue measure) with the hints the
// integrator needs at the edges of the dyadic range.
struct WeightedDensity1D {
  std::function<double(double)> density;  // evaluated at y != 0, must be >= 0
  double sing_order = 0.0;                // density ~ c0 |y|^{-sing_order} as y -> 0
  bool symmetric = false;
  std::vector<double> breakpoints;        // radii > 0 where density/integrand jumps
  // Exact asymptotics when known (pure power law); skips measurement uncertainty.
  std::optional<double> exact_sing_coef;
  std::optional<double> exact_tail_coef;
  std::optional<double> exact_tail_order;
};

struct QuadResult {
  Cplx value{0.0, 0.0};
  double abs_error = 0.0;
  long evaluations = 0;
};

// density ~ coef * |y|^{-order} near the given edge.
struct PowerLawFit {
  double coef = 0.0;
  double order = 0.0;
  double rel_uncertainty = 0.0;
  bool zero = false;  // density vanishes at the edge
};

PowerLawFit fit_inner_power_law(const WeightedDensity1D& w);
PowerLawFit fit_outer_power_law(const WeightedDensity1D& w);

// \int_0^{inner edge} y^m w(y) dy from the inner power-law fit. Throws
// IntegrabilityError when the fit implies divergence.
double inner_moment(const PowerLawFit& fit, int m);

// Tail mass \int_{outer edge}^infty w(y) dy from the outer fit (per side).
double outer_tail_mass(const PowerLawFit& fit);

// Adaptive Gauss-Kronrod 7-15 integration of g(y) * w(|y|-signed y) over the dyadic
// range on the requested half-lines. g receives the signed coordinate. osc_scale ~ the
// oscillation frequency of g, used to pre-split shells; extra breakpoints are split
// points in |y|. No edge corrections are applied here.
QuadResult integrate_shells(const std::function<Cplx(double)>& g,
                            const WeightedDensity1D& w, bool positive_side,
                            bool negative_side, double osc_scale,
                            std::span<const double> extra_breakpoints,
                            const QuadOptions& opt);

// Full Levy-Khinchine jump integral for a 1-d density:
//   \int_R (e^{i y xi} - 1 - i y xi 1_{|y| <= cutoff_radius}) w(y) dy
// with series evaluation near 0, analytic inner tail, and fitted outer tail.
QuadResult levy_khinchine_integral_1d(const WeightedDensity1D& w, double xi,
                                      double cutoff_radius, const QuadOptions& opt);

// Isotropic case in dimension d (1, 2 or 3), reduced to a radial integral:
//   \int_{R^d} (e^{i y'xi} - 1 - i y'xi chi(y)) n(|y|) dy
//     = \int_0^inf S_d(r |xi|) n(r) r^{d-1} dr,
// where S_d(u) = |S^{d-1}| (Lambda_d(u) - 1) and Lambda_d is cos / J_0 / sinc for
// d = 1 / 2 / 3. Odd parts cancel, so the cutoff does not enter and the value is real.
QuadResult levy_khinchine_integral_radial(const WeightedDensity1D& profile, int dim,
                                          double xi_norm, const QuadOptions& opt);

// Signed first moment \int_{lo <= |y| <= hi} y w(y) dy; exactly zero for symmetric
// densities. Used to move jump compensation between cutoff radii.
double first_moment_in_band(const WeightedDensity1D& w, double lo, double hi,
                            const QuadOptions& opt, double* abs_err = nullptr);

// e^{iu} - 1 - (compensate ? iu : 0), series-evaluated for small |u|.
Cplx oscillatory_core(double u, bool compensate);

}  // namespace symindex
