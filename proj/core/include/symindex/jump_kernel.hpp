#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "symindex/cutoff.hpp"
#include "symindex/quadrature.hpp"
#include "symindex/types.hpp"

namespace symindex {

class PathRng;
struct JumpKernel;

struct NoJumps {};

// Finite-activity kernel N(dy) = intensity * f(y) dy with f a probability density.
// draw() samples one jump from f.
struct CompoundPoisson {
  double intensity = 1.0;
  std::function<double(double)> jump_density;
  std::function<double(PathRng&)> draw;
  bool symmetric = false;
  std::vector<double> breakpoints;
};

// Isotropic alpha-stable kernel normalized so the symbol is scale^alpha |xi|^alpha.
struct SymmetricStable {
  double alpha = 1.0;
  double scale = 1.0;
};

// N(dy) = (c / |y|) e^{-|y| / sqrt(2c)} dy; symbol c log(1 + 2 c xi^2).
struct VarianceGamma {
  double c = 1.0;
};

// Isotropic kernel in dimension 1..3 given by its radial profile: N(dy) = n(|y|) dy.
struct RadialDensity {
  int dim = 1;
  std::function<double(double)> profile;
  double sing_order = 0.0;  // n(r) ~ c r^{-sing_order} as r -> 0
  std::vector<double> breakpoints;
  std::optional<double> exact_sing_coef;
  std::optional<double> exact_tail_coef;
  std::optional<double> exact_tail_order;
};

// Free-form scalar Levy density.
struct CustomDensity1D {
  std::function<double(double)> density;
  double sing_order = 0.0;
  bool symmetric = false;
  std::vector<double> breakpoints;
  std::optional<double> exact_sing_coef;
  std::optional<double> exact_tail_coef;
  std::optional<double> exact_tail_order;
};

// Image of a scalar kernel under y = a * eta (a one-dimensional jump pushed along a
// fixed direction), e.g. one SDE coordinate driven by a scalar Levy process.
struct MappedKernel {
  std::shared_ptr<const JumpKernel> base;  // must be one-dimensional
  Vec a;
};

// Independent superposition: N = sum of the parts (all of the same dimension).
struct KernelSum {
  std::vector<JumpKernel> parts;
};

// Measure known only through its compensated Levy-Khinchine integral, e.g. the image
// of a scalar measure under a nonlinear map. Integration-only: no density, no sampling.
struct OpaqueKernel {
  int dim = 1;
  std::function<QuadResult(std::span<const double> xi, const CutoffFunction& chi,
                           const QuadOptions& opt)>
      integral;
};

struct JumpKernel {
  std::variant<NoJumps, CompoundPoisson, SymmetricStable, VarianceGamma, RadialDensity,
               CustomDensity1D, MappedKernel, KernelSum, OpaqueKernel>
      v;
};

// Dimension the kernel lives in; 0 means any (NoJumps, SymmetricStable).
int kernel_dim(const JumpKernel& k);

bool kernel_symmetric(const JumpKernel& k);

// Throws ValidationError when parameters are out of range or dimensions disagree.
void validate_kernel(const JumpKernel& k, int dim);

// c(d, alpha) with c |y|^{-d-alpha} dy integrating to |xi|^alpha in the symbol.
double stable_density_constant(int dim, double alpha);

// Scalar view of a one-dimensional kernel (nullopt for NoJumps). Used by the
// simulation and COGARCH layers, which need the density itself.
std::optional<WeightedDensity1D> kernel_density_1d(const JumpKernel& k);

// \int (e^{i y'xi} - 1 - i y'xi chi(y)) N(dy); the symbol subtracts this.
Cplx jump_symbol_integral(const JumpKernel& k, std::span<const double> xi,
                          const CutoffFunction& chi, const QuadOptions& opt,
                          double* abs_err = nullptr);

}  // namespace symindex
