#pragma once

#include <span>

#include "symindex/errors.hpp"
#include "symindex/types.hpp"

namespace symindex {

// Cut-off function chi in the Levy-Khinchine compensator: the indicator of the
// closed ball of the given radius. The radius is configurable but must stay well
// inside the dyadic integration range.
struct CutoffFunction {
  double radius = 1.0;

  bool operator()(std::span<const double> y) const { return norm2(y) <= radius; }
  bool contains_radius(double r) const { return r <= radius; }

  void validate() const {
    if (!(radius >= 0x1.0p-30 && radius <= 0x1.0p30))
      throw ValidationError("cutoff radius must lie in [2^-30, 2^30]");
  }
};

}  // namespace symindex
