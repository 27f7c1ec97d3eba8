#pragma once

#include <span>
#include <vector>

#include "symindex/cutoff.hpp"
#include "symindex/jump_kernel.hpp"
#include "symindex/types.hpp"

namespace symindex {

// Characteristics (ell, Q, N, chi) of a Levy process in R^d.
struct LevyTriplet {
  int dim = 1;
  Vec drift;                   // ell; empty means zero
  std::vector<Vec> diffusion;  // Q, symmetric positive semidefinite; empty means zero
  JumpKernel jumps{NoJumps{}};
  CutoffFunction cutoff{};
};

// Throws ValidationError on dimension mismatches, an asymmetric or indefinite Q, or
// invalid kernel parameters.
void validate_triplet(const LevyTriplet& t);

double quadratic_form(const std::vector<Vec>& q, std::span<const double> xi);

// p(xi) = -i ell'xi + xi'Q xi / 2 - \int (e^{iy'xi} - 1 - iy'xi chi(y)) N(dy).
SymbolValue levy_symbol(const LevyTriplet& t, std::span<const double> xi,
                        const QuadOptions& opt = {}, double* abs_err = nullptr);

}  // namespace symindex
