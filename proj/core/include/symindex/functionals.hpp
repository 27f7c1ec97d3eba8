#pragma once

#include <optional>
#include <span>
#include <vector>

#include "symindex/ball_grid.hpp"
#include "symindex/quadrature.hpp"
#include "symindex/symbol_model.hpp"
#include "symindex/types.hpp"

namespace symindex {

// Grid-with-refinement search used by all sup/inf functionals. Deterministic: node
// placement has no randomness and reductions run in index order, so results are
// bit-stable across thread counts.
struct BallOptimizerConfig {
  int sphere_directions = 64;  // directions of the epsilon search per dimension
  int radial_levels = 8;       // radii j/levels covering the unit ball
  int y_grid = 128;            // node budget of the state search (ball or box)
  int refine_passes = 2;       // local re-grids around the incumbent
  double shrink_factor = 4.0;  // local grid edge reduction per pass
  QuadOptions quad{};          // forwarded to symbol evaluation

  void validate() const;
};

// Sector constant c0 = sup |Im p| / Re p and the resulting argument scale
// kappa = 1/(4 arctan(1/(2 c0))), with the limit value 1/(2 pi) at c0 = 0.
struct SectorEstimate {
  double c0 = 0.0;
  double kappa = 0.15915494309189535;  // 1/(2 pi)
  bool satisfied = true;
  Vec worst_x;   // point attaining the ratio (empty when no point qualified)
  Vec worst_xi;
};

double kappa_from_c0(double c0);

// sup_{\|y-x\| <= 2R} sup_{\|eps\| <= 1} |p(y, eps/R)|. The state ball is searched
// only along coordinates the symbol depends on.
double H_local(const SymbolModel& m, std::span<const double> x, double R,
               const BallOptimizerConfig& cfg = {});

// inf_{\|y-x\| <= 2R} sup_{\|eps\| <= 1} Re p(y, eps/(4 kappa R)). Requires the
// sector condition.
double h_local(const SymbolModel& m, std::span<const double> x, double R,
               const SectorEstimate& sector, const BallOptimizerConfig& cfg = {});

struct GlobalValue {
  double value = 0.0;
  // set when the state supremum had to be restricted to the given bounded domain
  bool domain_restricted = false;
};

// sup over all states of sup_{\|eps\| <= 1} |p(y, eps/R)|. Exact for state-free
// symbols, analytic envelope for stable-like families, grid search over y_domain
// otherwise (then flagged domain_restricted; without a domain this is an error).
GlobalValue H_global(const SymbolModel& m, double R,
                     const std::optional<Box>& y_domain = std::nullopt,
                     const BallOptimizerConfig& cfg = {});

// inf over states of sup_{\|eps\| <= 1} Re p(y, eps/(4 kappa R)), same state
// handling as H_global.
GlobalValue h_global(const SymbolModel& m, double R, const SectorEstimate& sector,
                     const std::optional<Box>& y_domain = std::nullopt,
                     const BallOptimizerConfig& cfg = {});

// Batch forms over a whole R grid: state preparations are shared across R values,
// which matters when preparing a state involves quadrature.
std::vector<double> H_global_batch(const SymbolModel& m, std::span<const double> r_grid,
                                   const std::optional<Box>& y_domain,
                                   const BallOptimizerConfig& cfg,
                                   bool* domain_restricted = nullptr);
std::vector<double> h_global_batch(const SymbolModel& m, std::span<const double> r_grid,
                                   const SectorEstimate& sector,
                                   const std::optional<Box>& y_domain,
                                   const BallOptimizerConfig& cfg,
                                   bool* domain_restricted = nullptr);

// c0 over a grid of states in x_domain and arguments with log-spaced magnitudes up
// to the radius of xi_domain. Points with both parts below tolerance are skipped;
// a point with vanishing real part but nonzero imaginary part marks the sector
// condition as violated.
SectorEstimate estimate_sector_constant(const SymbolModel& m, const Box& x_domain,
                                        const Box& xi_domain,
                                        const BallOptimizerConfig& cfg = {});

// sup over x in the box and log-spaced xi up to |xi| = 1e6 of |p(x,xi)|/(1+|xi|^2);
// finiteness of the returned constant is the local-growth check.
double check_local_growth(const SymbolModel& m, const Box& compact_box,
                          const BallOptimizerConfig& cfg = {});

}  // namespace symindex
