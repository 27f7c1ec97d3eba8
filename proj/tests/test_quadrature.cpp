#include <cmath>
#include <complex>

#include "doctest.h"
#include "oracles.hpp"
#include "symindex/jump_kernel.hpp"
#include "symindex/quadrature.hpp"

using namespace symindex;

namespace {

WeightedDensity1D gaussian_density(double mean, double sd, double intensity) {
  WeightedDensity1D w;
  const double norm = intensity / (sd * std::sqrt(2.0 * M_PI));
  w.density = [mean, sd, norm](double y) {
    const double u = (y - mean) / sd;
    return norm * std::exp(-0.5 * u * u);
  };
  w.symmetric = mean == 0.0;
  return w;
}

}  // namespace

TEST_CASE("stable jump integral matches the closed form") {
  for (double alpha : {0.5, 1.0, 1.5, 1.9}) {
    auto dens = kernel_density_1d(JumpKernel{SymmetricStable{alpha, 1.0}});
    REQUIRE(dens.has_value());
    for (double xi : {0.5, 2.0, 31.0}) {
      QuadResult r = levy_khinchine_integral_1d(*dens, xi, 1.0, {});
      CHECK(r.value.real() == doctest::Approx(-std::pow(xi, alpha)).epsilon(1e-7));
      CHECK(std::abs(r.value.imag()) < 1e-9);
    }
  }
}

TEST_CASE("variance gamma jump integral matches the closed form") {
  const double c = 2.0;
  auto dens = kernel_density_1d(JumpKernel{VarianceGamma{c}});
  REQUIRE(dens.has_value());
  for (double xi : {0.3, 1.0, 8.0}) {
    const double want = -c * std::log1p(2.0 * c * xi * xi);
    QuadResult r = levy_khinchine_integral_1d(*dens, xi, 1.0, {});
    CHECK(r.value.real() == doctest::Approx(want).epsilon(1e-7));
  }
}

TEST_CASE("asymmetric bounded density matches the trapezoid oracle") {
  WeightedDensity1D w = gaussian_density(0.5, 1.0, 2.0);
  const double xi = 1.7, rc = 1.0;
  QuadResult r = levy_khinchine_integral_1d(w, xi, rc, {});
  Cplx o = oracles::lk_integral(w.density, xi, rc, 1e-9, 12.0, 400000);
  CHECK(r.value.real() == doctest::Approx(o.real()).epsilon(1e-6));
  CHECK(r.value.imag() == doctest::Approx(o.imag()).epsilon(1e-6));
}

TEST_CASE("cutoff radius moves the compensation") {
  WeightedDensity1D w = gaussian_density(0.5, 1.0, 1.0);
  const double xi = 0.9;
  QuadResult narrow = levy_khinchine_integral_1d(w, xi, 0.25, {});
  QuadResult wide = levy_khinchine_integral_1d(w, xi, 4.0, {});
  // difference is exactly i xi \int_{0.25 <= |y| <= 4} y f(y) dy
  const double m = oracles::first_moment(w.density, 0.25, 4.0, 400000);
  CHECK(narrow.value.real() == doctest::Approx(wide.value.real()).epsilon(1e-8));
  CHECK(narrow.value.imag() - wide.value.imag() == doctest::Approx(xi * m).epsilon(1e-6));
}

TEST_CASE("band first moment") {
  QuadOptions opt;

  SUBCASE("symmetric density gives exactly zero") {
    auto dens = kernel_density_1d(JumpKernel{SymmetricStable{1.2, 1.0}});
    CHECK(first_moment_in_band(*dens, 0.1, 10.0, opt) == 0.0);
  }

  SUBCASE("uniform jump density has a closed form") {
    // density 1/4 on [-1, 3]
    WeightedDensity1D w;
    w.density = [](double y) { return (y >= -1.0 && y <= 3.0) ? 0.25 : 0.0; };
    w.breakpoints = {1.0, 3.0};
    const double got = first_moment_in_band(w, 0.5, 2.0, opt);
    CHECK(got == doctest::Approx(0.375).epsilon(1e-9));
  }

  SUBCASE("gaussian band moment matches the oracle") {
    WeightedDensity1D w = gaussian_density(0.5, 1.0, 1.0);
    const double got = first_moment_in_band(w, 0.0, 1.0, opt);
    const double want = oracles::first_moment(w.density, 1e-12, 1.0, 400000);
    CHECK(got == doctest::Approx(want).epsilon(1e-7));
  }
}

TEST_CASE("radial reduction in higher dimension") {
  for (int d : {2, 3}) {
    const double alpha = 1.0;
    WeightedDensity1D profile;
    const double coef = stable_density_constant(d, alpha);
    profile.density = [coef, alpha, d](double r) {
      return coef * std::pow(r, -double(d) - alpha);
    };
    profile.symmetric = true;
    profile.sing_order = d + alpha;
    profile.exact_sing_coef = coef;
    profile.exact_tail_coef = coef;
    profile.exact_tail_order = d + alpha;
    for (double xin : {0.5, 3.0}) {
      QuadResult r = levy_khinchine_integral_radial(profile, d, xin, {});
      CHECK(r.value.real() == doctest::Approx(-std::pow(xin, alpha)).epsilon(1e-6));
      CHECK(r.value.imag() == 0.0);
    }
  }
}

TEST_CASE("large arguments stay accurate despite oscillation") {
  auto dens = kernel_density_1d(JumpKernel{SymmetricStable{0.5, 1.0}});
  QuadResult r = levy_khinchine_integral_1d(*dens, 1e4, 1.0, {});
  CHECK(r.value.real() == doctest::Approx(-100.0).epsilon(1e-6));
}

TEST_CASE("reported error bounds the defect") {
  auto dens = kernel_density_1d(JumpKernel{SymmetricStable{1.5, 1.0}});
  QuadResult r = levy_khinchine_integral_1d(*dens, 2.0, 1.0, {});
  const double truth = -std::pow(2.0, 1.5);
  CHECK(std::abs(r.value.real() - truth) <= std::max(r.abs_error, 1e-9));
  CHECK(r.abs_error < 1e-4);
}
