#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

namespace symindex {

using Vec = std::vector<double>;
using Cplx = std::complex<double>;

// Value of the symbol p(x, xi). For a continuous negative definite function the real
// part is >= 0; numeric evaluations may dip below zero by the quadrature tolerance.
struct SymbolValue {
  double re = 0.0;
  double im = 0.0;

  Cplx c() const { return {re, im}; }
  static SymbolValue from(Cplx z) { return {z.real(), z.imag()}; }
};

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace symindex
