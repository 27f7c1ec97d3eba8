#include "symindex/rng.hpp"

#include <cmath>
#include <numbers>

#include "symindex/errors.hpp"

namespace symindex {

PathRng::PathRng(const RngSpec& spec, std::uint64_t path_index) {
  std::uint64_t s = spec.seed ^ (0x9e3779b97f4a7c15ULL * (path_index + 1));
  std::uint32_t words[8];
  for (int i = 0; i < 4; ++i) {
    std::uint64_t w = splitmix64(s);
    words[2 * i] = static_cast<std::uint32_t>(w);
    words[2 * i + 1] = static_cast<std::uint32_t>(w >> 32);
  }
  std::seed_seq seq(words, words + 8);
  eng_.seed(seq);
}

double PathRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = u01_open();
  double u2 = u01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

double PathRng::exponential() { return -std::log(u01_open()); }

double PathRng::gamma(double shape) {
  if (!(shape > 0.0)) throw ValidationError("gamma shape must be positive");
  if (shape < 1.0) {
    // Boost small shapes: Gamma(a) = Gamma(a+1) * U^{1/a}.
    double u = u01_open();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = u01_open();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

long PathRng::poisson(double mean) {
  if (mean < 0.0) throw ValidationError("poisson mean must be >= 0");
  long total = 0;
  // Knuth's product method, chunked so the loop length stays bounded.
  while (mean > 30.0) {
    double limit = std::exp(-30.0);
    long k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= u01_open();
    } while (p > limit);
    total += k - 1;
    mean -= 30.0;
  }
  double limit = std::exp(-mean);
  long k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= u01_open();
  } while (p > limit);
  return total + k - 1;
}

double PathRng::symmetric_stable(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ValidationError("stable alpha must be in (0,2]");
  if (alpha == 2.0) return std::numbers::sqrt2 * normal();  // cf exp(-xi^2)
  double u = std::numbers::pi * (u01_open() - 0.5);  // Unif(-pi/2, pi/2)
  double w = exponential();
  double cu = std::cos(u);
  double x = std::sin(alpha * u) / std::pow(cu, 1.0 / alpha);
  double tail = std::cos(u - alpha * u) / w;
  // (1-alpha)/alpha == 0 at alpha=1 makes the factor exactly 1 (Cauchy: tan U).
  return x * std::pow(tail, (1.0 - alpha) / alpha);
}

double PathRng::positive_stable(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("positive stable needs alpha in (0,1)");
  double theta = std::numbers::pi * u01_open();
  double w = exponential();
  double s1 = std::sin(alpha * theta);
  double s2 = std::sin((1.0 - alpha) * theta);
  double s = std::sin(theta);
  double a = std::pow(s1, alpha / (1.0 - alpha)) * s2 / std::pow(s, 1.0 / (1.0 - alpha));
  return std::pow(a / w, (1.0 - alpha) / alpha);
}

}  // namespace symindex
