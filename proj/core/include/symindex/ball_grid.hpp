#pragma once

#include <span>
#include <vector>

#include "symindex/types.hpp"

namespace symindex {

// Inverse of the standard normal CDF (rational approximation plus one Halley
// correction, good to full double precision). p must lie in (0, 1).
double inverse_normal_cdf(double p);

// count deterministic unit vectors spread over the sphere S^{d-1}: the two signs for
// d = 1 (count is ignored there), equiangular points for d = 2, a Fibonacci lattice
// for d = 3, and inverse-normal-mapped Halton points for higher dimensions.
std::vector<Vec> sphere_directions(int dim, int count);

// Nodes covering the closed unit ball: every direction at the radii j/levels,
// j = 1..levels. The outermost shell is the unit sphere; the origin is not included.
std::vector<Vec> unit_ball_grid(int dim, int directions, int levels);

// center + scale * (unit-ball nodes), with anything that lands outside the unit ball
// pulled back onto the sphere. Used to refine a supremum around an incumbent.
std::vector<Vec> local_ball_grid(std::span<const double> center, double scale,
                                 int directions, int levels);

struct Box {
  Vec lo;
  Vec hi;
  int dim() const { return static_cast<int>(lo.size()); }
  void validate() const;
};

// Tensor grid with per_axis nodes on every active coordinate. Coordinates with
// mask[i] == false, or with lo[i] == hi[i], collapse to their midpoint; an empty mask
// means all coordinates are active. Throws when the node count would exceed 10^7.
std::vector<Vec> box_grid(const Box& box, int per_axis,
                          const std::vector<bool>& mask = {});

// Box with the parent's edge lengths divided by factor, centered as close to center
// as possible while staying inside the parent.
Box shrink_box(const Box& parent, std::span<const double> center, double factor);

// n points log-spaced over [lo, hi], lo > 0.
Vec log_spaced(double lo, double hi, int n);

}  // namespace symindex
