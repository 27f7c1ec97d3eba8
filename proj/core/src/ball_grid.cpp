#include "symindex/ball_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "symindex/errors.hpp"

namespace symindex {

namespace {

constexpr double kPi = 3.141592653589793;

// Acklam's rational approximation in three regions.
double acklam(double p) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5, r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double radical_inverse(int base, long index) {
  double inv = 1.0 / base, f = inv, x = 0.0;
  while (index > 0) {
    x += f * (index % base);
    index /= base;
    f *= inv;
  }
  return x;
}

}  // namespace

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw ValidationError("inverse normal CDF needs p in (0, 1)");
  double x = acklam(p);
  // one Halley step against the exact CDF
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

std::vector<Vec> sphere_directions(int dim, int count) {
  if (dim < 1) throw ValidationError("sphere dimension must be >= 1");
  if (dim == 1) return {{1.0}, {-1.0}};
  if (count < 2) throw ValidationError("need at least 2 sphere directions");
  std::vector<Vec> out;
  out.reserve(count);
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double t = 2.0 * kPi * k / count;
      out.push_back({std::cos(t), std::sin(t)});
    }
    return out;
  }
  if (dim == 3) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double t = golden * k;
      out.push_back({r * std::cos(t), r * std::sin(t), z});
    }
    return out;
  }
  static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                               31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
  if (dim > static_cast<int>(sizeof(primes) / sizeof(primes[0])))
    throw ValidationError("sphere directions support dimensions up to 20");
  for (int k = 0; k < count; ++k) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i)
      v[i] = inverse_normal_cdf(radical_inverse(primes[i], k + 1));
    double n = norm2(v);
    if (n < 1e-12) {
      v.assign(dim, 0.0);
      v[0] = 1.0;
      n = 1.0;
    }
    for (double& vi : v) vi /= n;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Vec> unit_ball_grid(int dim, int directions, int levels) {
  if (levels < 1) throw ValidationError("need at least 1 radial level");
  std::vector<Vec> dirs = sphere_directions(dim, directions);
  std::vector<Vec> out;
  out.reserve(dirs.size() * levels);
  for (int j = 1; j <= levels; ++j) {
    const double r = static_cast<double>(j) / levels;
    for (const Vec& d : dirs) {
      Vec v = d;
      for (double& vi : v) vi *= r;
      out.push_back(std::move(v));
    }
  }
  return out;
}

std::vector<Vec> local_ball_grid(std::span<const double> center, double scale,
                                 int directions, int levels) {
  const int dim = static_cast<int>(center.size());
  std::vector<Vec> nodes = unit_ball_grid(dim, directions, levels);
  for (Vec& v : nodes) {
    for (int i = 0; i < dim; ++i) v[i] = center[i] + scale * v[i];
    const double n = norm2(v);
    if (n > 1.0)
      for (double& vi : v) vi /= n;
  }
  return nodes;
}

void Box::validate() const {
  if (lo.empty() || lo.size() != hi.size())
    throw ValidationError("box bounds must be non-empty and of equal dimension");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || lo[i] > hi[i])
      throw ValidationError("box bounds must be finite with lo <= hi");
  }
}

std::vector<Vec> box_grid(const Box& box, int per_axis, const std::vector<bool>& mask) {
  box.validate();
  if (per_axis < 2) throw ValidationError("box grid needs at least 2 nodes per axis");
  const int d = box.dim();
  if (!mask.empty() && static_cast<int>(mask.size()) != d)
    throw ValidationError("mask dimension disagrees with the box");
  std::vector<int> counts(d, 1);
  double total = 1.0;
  for (int i = 0; i < d; ++i) {
    const bool active = (mask.empty() || mask[i]) && box.hi[i] > box.lo[i];
    counts[i] = active ? per_axis : 1;
    total *= counts[i];
  }
  if (total > 1e7) throw ValidationError("box grid would exceed 10^7 nodes");
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<int> idx(d, 0);
  while (true) {
    Vec v(d);
    for (int i = 0; i < d; ++i)
      v[i] = counts[i] == 1
                 ? 0.5 * (box.lo[i] + box.hi[i])
                 : box.lo[i] + (box.hi[i] - box.lo[i]) * idx[i] / (counts[i] - 1);
    out.push_back(std::move(v));
    int i = 0;
    for (; i < d; ++i) {
      if (++idx[i] < counts[i]) break;
      idx[i] = 0;
    }
    if (i == d) break;
  }
  return out;
}

Box shrink_box(const Box& parent, std::span<const double> center, double factor) {
  parent.validate();
  if (static_cast<int>(center.size()) != parent.dim())
    throw ValidationError("center dimension disagrees with the box");
  if (!(factor >= 1.0)) throw ValidationError("shrink factor must be >= 1");
  const int d = parent.dim();
  Box out;
  out.lo.resize(d);
  out.hi.resize(d);
  for (int i = 0; i < d; ++i) {
    const double half = 0.5 * (parent.hi[i] - parent.lo[i]) / factor;
    const double c = std::clamp(center[i], parent.lo[i] + half, parent.hi[i] - half);
    out.lo[i] = c - half;
    out.hi[i] = c + half;
  }
  return out;
}

Vec log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo)) throw ValidationError("log grid needs 0 < lo <= hi");
  if (n < 1) throw ValidationError("log grid needs at least one point");
  Vec out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double ratio = std::log(hi / lo);
  for (int k = 0; k < n; ++k) out[k] = lo * std::exp(ratio * k / (n - 1));
  out[n - 1] = hi;
  return out;
}

}  // namespace symindex
