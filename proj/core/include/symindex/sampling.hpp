#pragma once

#include <functional>
#include <vector>

#include "symindex/levy_triplet.hpp"
#include "symindex/quadrature.hpp"
#include "symindex/rng.hpp"
#include "symindex/types.hpp"

namespace symindex {

// Exact-in-law increment sampler for a Levy triplet. Construction factors the
// diffusion matrix and integrates the small-jump compensators once; a sample then
// costs a few variate draws per kernel part. Stable parts use the
// Chambers-Mallows-Stuck transform (subordinated Gaussian in dimension >= 2),
// variance gamma the gamma-difference representation, compound Poisson a
// Poisson-distributed number of density draws. RadialDensity, CustomDensity1D and
// OpaqueKernel carry no sampling recipe and are rejected at construction.
class IncrementSampler {
 public:
  explicit IncrementSampler(const LevyTriplet& t, const QuadOptions& opt = {});

  int dim() const { return dim_; }

  // One increment of the process over a step of length dt, written into out.
  void sample(double dt, PathRng& rng, Vec& out) const;

  Vec operator()(double dt, PathRng& rng) const;

 private:
  int dim_ = 1;
  Vec drift_;                    // per-unit-time drift including jump compensators
  std::vector<Vec> gauss_cols_;  // columns b_j with sum_j b_j b_j' = Q
  std::vector<std::function<void(double, PathRng&, Vec&)>> jump_parts_;

  void add_kernel(const JumpKernel& k, double rc, const QuadOptions& opt);
};

// One increment of the Levy process with triplet t over dt. Builds a sampler per
// call; loops should construct an IncrementSampler once instead.
Vec sample_levy_increment(const LevyTriplet& t, double dt, PathRng& rng);

}  // namespace symindex
