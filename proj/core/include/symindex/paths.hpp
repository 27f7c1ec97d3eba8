#pragma once

#include <functional>
#include <span>
#include <vector>

#include "symindex/cogarch.hpp"
#include "symindex/rng.hpp"
#include "symindex/sampling.hpp"
#include "symindex/symbol_model.hpp"
#include "symindex/types.hpp"

namespace symindex {

// Uniform time grid on [0, horizon].
struct PathGrid {
  double horizon = 1.0;
  long n_steps = 1;

  double dt() const { return horizon / double(n_steps); }
  // t_k with exact endpoints t_0 = 0 and t_n = horizon.
  double time_at(long k) const;
  void validate() const;
};

// Monte Carlo ensemble recorded at a subset of the grid times. States are stored
// flattened per path (times.size() x dim, row-major); the running maximum
// sup_{s <= t} |X_s - x0| is tracked over every grid step, not only the kept ones.
// Exploded paths keep their finite prefix; entries from the explosion on are NaN and
// the path index is listed in exploded.
struct PathEnsemble {
  int dim = 1;
  double horizon = 0.0;
  Vec x0;
  Vec times;                     // kept grid times, always starting at 0
  std::vector<Vec> path_states;  // [path], flattened times.size() * dim
  std::vector<Vec> path_max;     // [path], running maximum at each kept time
  std::vector<long> exploded;    // paths that left double range, ascending
  RngSpec rng;

  long paths() const { return long(path_states.size()); }
  std::span<const double> state_at(std::size_t path, std::size_t t_index) const;
};

// Row map of the SDE coefficient: phi(x) returns the d rows of the d x n matrix
// multiplying the driver increment.
using PhiFn = std::function<std::vector<Vec>(std::span<const double>)>;

// One Euler path of dX = Phi(X_-) dZ. observe is called at every grid node starting
// with (0, 0.0, x0); returning false stops the walk early. The return value is false
// when the path left double range (observe never sees a non-finite state).
// phi_constant skips re-evaluating phi along the path.
bool walk_sde_path(const PhiFn& phi, bool phi_constant, const IncrementSampler& driver,
                   std::span<const double> x0, const PathGrid& grid, PathRng& rng,
                   const std::function<bool(long, double, std::span<const double>)>& observe);

// Euler ensemble of dX = Phi(X_-) dZ started at x0. keep_times are matched to the
// nearest grid nodes (the actual node times are what the ensemble reports); when
// empty, every grid node is kept. Paths are independent substreams of rng, so the
// result is bit-identical for a given seed regardless of the thread count.
PathEnsemble simulate_sde(const PhiFn& phi, const LevyTriplet& driver,
                          std::span<const double> x0, const PathGrid& grid,
                          const RngSpec& rng, long n_paths,
                          std::span<const double> keep_times = {},
                          bool phi_constant = false);

// COGARCH ensemble over the pair (G, V = log S^2) started at (g0, log s0^2):
//   S^2_{k+1} = S^2_k + (beta + S^2_k log delta) dt + S^2_k (lambda/delta) (dZ_k)^2,
//   G_{k+1} = G_k + S_k dZ_k.
// Positivity of S^2 needs dt < 1 / |log delta|, which is enforced.
PathEnsemble simulate_cogarch(const CogarchParams& params, double g0, double s0,
                              const PathGrid& grid, const RngSpec& rng, long n_paths,
                              std::span<const double> keep_times = {});

// Reusable simulation recipe for a model started at x0: the increment sampler is
// built once, then any number of paths can be walked. Levy models use the identity
// coefficient, SDE-composed models their Phi, COGARCH its volatility recursion on
// (G, V) with S^2 = e^V. The other families have no sampling recipe and are rejected.
class ModelSimulator {
 public:
  ModelSimulator(const SymbolModel& m, std::span<const double> x0);

  int dim() const { return int(x0_.size()); }
  const Vec& start() const { return x0_; }

  // Same observe contract as walk_sde_path.
  bool walk(const PathGrid& grid, PathRng& rng,
            const std::function<bool(long, double, std::span<const double>)>& observe)
      const;

  PathEnsemble ensemble(const PathGrid& grid, const RngSpec& rng, long n_paths,
                        std::span<const double> keep_times = {}) const;

 private:
  Vec x0_;
  std::shared_ptr<const IncrementSampler> sampler_;
  PhiFn phi_;
  bool phi_constant_ = false;
  bool cogarch_ = false;
  double cog_beta_ = 0.0, cog_ld_ = 0.0, cog_lod_ = 0.0;
};

// Closed-form flow of the two-circle ODE example: a point on the unit circle around
// (0, 1) or (0, -1) (the two touch at the origin) traverses first the upper then the
// lower circle with overall period 4 pi; every other point is frozen.
Vec deterministic_example(std::span<const double> x0, double t);

// Per-path running maximum at the last kept time <= t. Exploded paths give NaN.
Vec max_process(const PathEnsemble& e, double t);

}  // namespace symindex
