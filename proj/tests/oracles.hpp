#pragma once

#include <functional>
#include <span>

#include "symindex/symbol_model.hpp"
#include "symindex/types.hpp"

// Brute-force reference implementations, deliberately independent of the adaptive
// quadrature and grid search used by the library.
namespace oracles {

// Levy-Khinchine integral of a one-dimensional density on a log-spaced trapezoid
// grid over lo <= |y| <= hi, compensating the linear term where |y| <= rc:
//   \int (e^{i y xi} - 1 - i y xi 1_{|y| <= rc}) f(y) dy
symindex::Cplx lk_integral(const std::function<double(double)>& density, double xi,
                           double rc, double lo, double hi, long n);

// \int_{lo <= |y| <= hi} y f(y) dy on the same grid.
double first_moment(const std::function<double(double)>& density, double lo,
                    double hi, long n);

// \int_{lo <= |y| <= hi} g(y) f(y) dy on the same grid.
double weighted_band_integral(const std::function<double(double)>& density,
                              const std::function<double(double)>& g, double lo,
                              double hi, long n);

// Jump integral of a driver density pushed through the phase
// phi(w) = a w + b log(1 + lod w^2), compensated where |w| < w_star:
//   \int (e^{i phi(w)} - 1 - i phi(w) 1_{|w| < w_star}) f(w) dw
symindex::Cplx cogarch_image_integral(const std::function<double(double)>& density,
                                      double a, double b, double lod, double w_star,
                                      double lo, double hi, long n);

// sup_{|y - x| <= 2R} sup_{|eps| <= 1} |p(y, eps/R)| by dense grids, scalar state.
double grid_H_local(const symindex::SymbolModel& m, double x, double R,
                    int state_nodes, int dir_nodes);

// inf_{|y - x| <= 2R} sup_{|eps| <= 1} Re p(y, eps/(4 kappa R)), scalar state.
double grid_h_local(const symindex::SymbolModel& m, double x, double R, double kappa,
                    int state_nodes, int dir_nodes);

// frozen reference values
inline constexpr double kTwoLogFive = 3.2188758248682006;      // VG witness 2 log 5
inline constexpr double kKappaZero = 0.15915494309189535;      // 1/(2 pi)
inline constexpr double kLemFtC = 2.541494082536798;           // 1/(1 - e^{-1/2})
inline constexpr double kZ995 = 2.5758293035489004;            // Phi^{-1}(0.995)
inline constexpr double kBrownianH = 1.2337005501361697;       // pi^2/8, h(R) R^2 of BM

}  // namespace oracles
