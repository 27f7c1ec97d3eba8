#pragma once

#include <memory>
#include <optional>
#include <span>

#include "symindex/levy_triplet.hpp"
#include "symindex/quadrature.hpp"
#include "symindex/types.hpp"

namespace symindex {

// Continuous-time GARCH pair (G, S) driven by a scalar Levy process Z, analyzed
// through the state (G, V) with V = log S^2:
//   dS^2_t = beta dt + S^2_t (log(delta) dt + (lambda/delta) d[sum of (Delta Z_s)^2]),
//   G_t = g + \int S_{s-} dZ_s.
struct CogarchParams {
  LevyTriplet driver;   // triplet of Z, one-dimensional
  double beta = 1.0;    // > 0
  double lambda = 0.0;  // >= 0
  double delta = 0.5;   // in (0, 1)
};

void validate_cogarch(const CogarchParams& p);

// exp(v)-scaled coefficients overflow double range long before this; reject early.
inline constexpr double kCogarchMaxAbsV = 50.0;

// Moments of the driver measure against powers of w and L(w) = log(1+(lambda/delta)w^2),
// m[j][k] ~ \int w^j L^k N(dw). They do not depend on the state, so one table per model
// serves every prepared state. Only drivers with light tails admit the table; heavy
// tails make the uncompensated tail integrals diverge.
struct CogarchMoments {
  double m20 = 0, m11 = 0, m02 = 0;
  double m30 = 0, m21 = 0, m12 = 0, m03 = 0;
  double m40 = 0, m31 = 0, m22 = 0, m13 = 0, m04 = 0;
  // absolute counterparts \int |w|^j L^k N(dw) of the fourth row, for remainder bounds
  double a40 = 0, a31 = 0, a22 = 0, a13 = 0, a04 = 0;
  double err = 0;
};

// State-dependent pieces of the symbol at volatility level v. Building one runs the
// recentring quadratures once; evaluations at many xi then reuse them.
struct CogarchPrepared {
  double beta = 0, lambda = 0, delta = 0, lod = 0;  // lod = lambda / delta
  double v = 0, ev = 1, ev2 = 1;                    // e^v, e^{v/2}
  double lz = 0, qz = 0, rz = 1;                    // driver drift, diffusion, cutoff
  double r1 = 0, r2 = 0, rmin = 0;  // |z_i| < 1 thresholds in w and their minimum
  double drift1 = 0;                // e^{v/2} (ell_Z + cut adjustment)
  double drift2 = 0;                // beta e^{-v} + log delta + compensated log-jump rate
  double diff = 0;                  // e^v Q_Z
  double err1 = 0, err2 = 0;        // quadrature error carried by drift1, drift2
  std::optional<WeightedDensity1D> dens;  // driver jump density
  PowerLawFit fit_pos{}, fit_neg{};       // inner fits of dens per side
  bool heavy_tail = false;                // nonzero fitted mass beyond the outer edge
  double tail_mass = 0;                   // that mass, both sides
  std::shared_ptr<const CogarchMoments> moments;  // null when unavailable
  double t1 = 0, t2 = 0, t_err = 0;  // \int_{|w|>=rmin} w N(dw) and L N(dw)
};

// Immutable per-model evaluator owning the state-free parts (density, inner fits,
// moment table).
class CogarchEvaluator {
 public:
  explicit CogarchEvaluator(CogarchParams p, bool build_moments = true);

  const CogarchParams& params() const { return p_; }

  CogarchPrepared prepare(double v, const QuadOptions& opt = {}) const;

  // p((g, v), xi); the symbol does not depend on g.
  static SymbolValue eval(const CogarchPrepared& st, std::span<const double> xi,
                          const QuadOptions& opt = {}, double* abs_err = nullptr);

  // Differential characteristics at volatility v, re-compensated from the model's
  // product-indicator cut-off to the ball indicator chi. The jump part is the image of
  // the driver measure under w -> (e^{v/2} w, log(1+(lambda/delta) w^2)), exposed as an
  // integration-only kernel.
  LevyTriplet characteristics(double v, const CutoffFunction& chi,
                              const QuadOptions& opt = {}) const;

 private:
  CogarchParams p_;
  std::optional<WeightedDensity1D> dens_;
  PowerLawFit fit_pos_{}, fit_neg_{};
  bool heavy_tail_ = false;
  double tail_mass_ = 0;
  std::shared_ptr<const CogarchMoments> moments_;
};

// One-off evaluation; builds no moment table. Many evaluations at a shared state
// should go through CogarchEvaluator::prepare instead.
SymbolValue cogarch_symbol(const CogarchParams& p, double g, double v,
                           std::span<const double> xi, const QuadOptions& opt = {},
                           double* abs_err = nullptr);

// Jump integral of the image measure with compensation threshold w_star in w:
//   \int (e^{i phi(w)} - 1 - i phi(w) 1_{|w| < w_star}) N(dw),
// phi(w) = e^{v/2} xi1 w + xi2 log(1+(lambda/delta) w^2).
QuadResult cogarch_jump_integral(const CogarchPrepared& st, double xi1, double xi2,
                                 double w_star, const QuadOptions& opt);

}  // namespace symindex
