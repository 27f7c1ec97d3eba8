#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symindex/functionals.hpp"
#include "symindex/paths.hpp"
#include "symindex/rng.hpp"
#include "symindex/symbol_model.hpp"
#include "symindex/types.hpp"

namespace symindex {

// Constants of the maximal inequalities, recomputed from their defining formulas
// c = 1/(1 - e^{-1/2}), ctilde_d = 2c(d+1), c_d = 4d + 16 ctilde_d.
struct BoundConstants {
  double c = 0.0;
  double c_tilde = 0.0;
  double c_d = 0.0;
};

BoundConstants bound_constants(int d);

// Wilson score interval for a binomial fraction at normal quantile z.
struct WilsonInterval {
  double low = 0.0;
  double high = 0.0;
};

WilsonInterval wilson_interval(double p_hat, long n, double z);

struct SymbolEstimate {
  double t = 0.0;
  SymbolValue value{};  // -(ECF - 1) / t
  double se_re = 0.0;   // MC standard errors of the two parts
  double se_im = 0.0;
  long used_paths = 0;
  std::string warning;  // set when MC noise dominates the estimate
};

// Estimates -(E[e^{i (X_{t ^ sigma} - x)' xi}] - 1)/t along a decreasing time grid,
// sigma being the first grid time outside the closed k_radius-ball around x. One
// ensemble walked to the largest time serves every t; the step is the smallest time
// divided by steps_per_smallest, and the times are snapped to grid nodes.
std::vector<SymbolEstimate> empirical_symbol(const SymbolModel& m,
                                             std::span<const double> x,
                                             std::span<const double> xi,
                                             std::span<const double> t_seq,
                                             double k_radius, const RngSpec& rng,
                                             long n_paths,
                                             long steps_per_smallest = 64);

struct BoundCell {
  double t = 0.0;
  double r = 0.0;
  double p_hat = 0.0;  // exceedance fraction P((X - x)*_t >= R)
  double ci_low = 0.0;
  double ci_high = 0.0;
  double bound = 0.0;  // c_d t H(x, R)
  bool pass = false;   // ci_low <= bound
};

struct BoundCheckReport {
  BoundConstants constants;
  double z = 0.0;  // normal quantile behind the 99% Wilson interval
  std::vector<BoundCell> cells;  // t-major over t_grid x r_grid
  long paths = 0;
  long excluded = 0;  // exploded paths, left out of every fraction
  bool all_pass = true;
};

// Monte Carlo check of P((X - x)*_t >= R) <= c_d t H(x, R) cell by cell. n_steps = 0
// picks the grid resolution automatically (16 steps per smallest time).
BoundCheckReport check_upper_bound(const SymbolModel& m, std::span<const double> x,
                                   std::span<const double> t_grid,
                                   std::span<const double> r_grid, const RngSpec& rng,
                                   long n_paths, const BallOptimizerConfig& cfg = {},
                                   long n_steps = 0);

struct LowerCell {
  double t = 0.0;
  double r = 0.0;
  double q_hat = 0.0;    // P((X - x)*_t < R)
  double h = 0.0;        // h(x, R)
  double product = 0.0;  // q_hat * t * h
};

// The lower inequality pins q_hat * t * h only up to an unprinted constant, so the
// check asserts boundedness: per-t maxima of the product must show no log-log trend
// in t beyond slope 0.2.
struct LowerBoundReport {
  SectorEstimate sector;
  std::vector<LowerCell> cells;
  double c_kappa_hat = 0.0;  // max product over the grid
  double trend_slope = 0.0;
  bool flat = false;
  bool inconclusive = false;  // fewer than two usable time levels
  long paths = 0;
  long excluded = 0;
};

LowerBoundReport check_lower_bound(const SymbolModel& m, std::span<const double> x,
                                   std::span<const double> t_grid,
                                   std::span<const double> r_grid,
                                   const SectorEstimate& sector, const RngSpec& rng,
                                   long n_paths, const BallOptimizerConfig& cfg = {},
                                   long n_steps = 0);

enum class ScalingDirection { ToZero, ToInfinity };

struct ScalingLevel {
  double t = 0.0;
  double median = 0.0;
  double q90 = 0.0;
};

struct ScalingOptions {
  long n_steps = 8192;  // grid steps per level
  // dyadic exponent range: t = 2^{-k} toward zero, t = 2^k toward infinity;
  // unset means k = 2..14 respectively k = 0..12
  std::optional<int> k_min;
  std::optional<int> k_max;
  int window = 6;       // monotone run demanded over the last window levels
  double factor = 4.0;  // total change demanded across the whole grid
  // known index nearest to lambda; margins under 0.1 sit on a theorem boundary and
  // are refused
  std::optional<double> index_hint;
};

struct ScalingReport {
  double lambda = 0.0;
  ScalingDirection direction = ScalingDirection::ToZero;
  std::vector<ScalingLevel> levels;  // ordered toward the limit
  std::string verdict;  // "tends-to-0", "tends-to-infinity" or "inconclusive"
  long paths_per_level = 0;
  double exploded_fraction = 0.0;
};

// Medians and 90th percentiles of t^{-1/lambda} (X - x)*_t over dyadic time levels,
// with a monotone-trend verdict on the medians.
ScalingReport scaling_diagnostic(const SymbolModel& m, std::span<const double> x,
                                 double lambda, ScalingDirection direction,
                                 const RngSpec& rng, long paths_per_level,
                                 const ScalingOptions& opt = {});

}  // namespace symindex
