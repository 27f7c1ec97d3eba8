#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "symindex/functionals.hpp"
#include "symindex/symbol_model.hpp"
#include "symindex/types.hpp"

namespace symindex {

// Growth and scaling indices estimated from the symbol functionals on a dyadic
// radius grid. Each estimator fills its half; the other half stays unset. The
// h-based entries are set only when the sector condition holds.
struct IndexReport {
  // origin (R -> infinity), from the global functionals
  std::optional<double> beta0;         // windowed min of the H exponent
  std::optional<double> beta0_lower;   // windowed max ("lower index", >= beta0)
  std::optional<double> delta0_upper;  // windowed min of the h exponent
  std::optional<double> delta0;        // windowed max

  // infinity (R -> 0), anchored at x, from the local functionals
  std::optional<double> beta_inf;        // windowed max of the H exponent
  std::optional<double> beta_inf_lower;  // windowed min
  std::optional<double> delta_inf_upper; // windowed max of the h exponent
  std::optional<double> delta_inf;       // windowed min

  Vec r_grid;               // radii actually used (points with log R = 0 are dropped)
  Vec H_of_r;               // upper functional per radius
  Vec g_H;                  // local exponent of the upper functional
  std::optional<Vec> h_of_r;  // lower functional, present when the sector holds
  std::optional<Vec> g_h;
  int window = 6;           // tail points the index statistics were taken over
  bool domain_restricted = false;
  std::optional<SectorEstimate> sector;
  Vec x;                    // anchor state (infinity-side estimates only)
};

// R = 2^k for k = 0..kmax, increasing (origin side).
Vec dyadic_grid_up(int kmax = 24);
// R = 2^-k for k = 0..kmax, decreasing (infinity side).
Vec dyadic_grid_down(int kmax = 24);

// Exponents g(R) = -log v(R) / log R, dropping grid points with |log R| = 0.
// Returns the kept radii and their exponents.
std::pair<Vec, Vec> local_exponents(std::span<const double> r,
                                    std::span<const double> v);

// min / max over the last w entries
std::pair<double, double> window_min_max(std::span<const double> g, int w);

// Origin indices from H(R) and h(R) on an increasing dyadic grid. The sector
// estimate is computed over y_domain (or the zero state for state-free models)
// unless one is supplied.
IndexReport estimate_indices_origin(const SymbolModel& m, std::span<const double> r_grid,
                                    const std::optional<Box>& y_domain = std::nullopt,
                                    const BallOptimizerConfig& cfg = {}, int window = 6,
                                    std::optional<SectorEstimate> sector = std::nullopt);

// Indices at infinity anchored at x, from H(x,R) and h(x,R) on a decreasing grid.
IndexReport estimate_indices_infinity(const SymbolModel& m, std::span<const double> x,
                                      std::span<const double> r_grid,
                                      const BallOptimizerConfig& cfg = {},
                                      int window = 6,
                                      std::optional<SectorEstimate> sector = std::nullopt);

}  // namespace symindex
