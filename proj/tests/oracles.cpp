#include "oracles.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "symindex/errors.hpp"

namespace oracles {
namespace {

using symindex::Cplx;

// trapezoid over one sign band [lo, hi] in log coordinates
Cplx band(const std::function<double(double)>& density,
          const std::function<double(double)>& phase, bool compensate, double lo,
          double hi, long n) {
  if (!(hi > lo) || !(lo > 0.0)) return {0.0, 0.0};
  const double du = std::log(hi / lo) / double(n);
  Cplx acc{0.0, 0.0};
  for (int side = -1; side <= 1; side += 2) {
    Cplx s{0.0, 0.0};
    for (long i = 0; i <= n; ++i) {
      const double w = lo * std::exp(double(i) * du);
      const double sw = side * w;
      const double ph = phase(sw);
      Cplx g = std::exp(Cplx{0.0, ph}) - 1.0;
      if (compensate) g -= Cplx{0.0, ph};
      g *= density(sw) * w;  // jacobian of the log substitution
      s += (i == 0 || i == n) ? 0.5 * g : g;
    }
    acc += s * du;
  }
  return acc;
}

}  // namespace

Cplx lk_integral(const std::function<double(double)>& density, double xi, double rc,
                 double lo, double hi, long n) {
  auto phase = [xi](double y) { return y * xi; };
  return band(density, phase, true, lo, std::min(rc, hi), n) +
         band(density, phase, false, std::max(rc, lo), hi, n);
}

double weighted_band_integral(const std::function<double(double)>& density,
                              const std::function<double(double)>& g, double lo,
                              double hi, long n) {
  if (!(hi > lo) || !(lo > 0.0)) return 0.0;
  const double du = std::log(hi / lo) / double(n);
  double acc = 0.0;
  for (int side = -1; side <= 1; side += 2) {
    double s = 0.0;
    for (long i = 0; i <= n; ++i) {
      const double w = lo * std::exp(double(i) * du);
      const double sw = side * w;
      const double v = g(sw) * density(sw) * w;
      s += (i == 0 || i == n) ? 0.5 * v : v;
    }
    acc += s * du;
  }
  return acc;
}

double first_moment(const std::function<double(double)>& density, double lo,
                    double hi, long n) {
  return weighted_band_integral(density, [](double y) { return y; }, lo, hi, n);
}

Cplx cogarch_image_integral(const std::function<double(double)>& density, double a,
                            double b, double lod, double w_star, double lo, double hi,
                            long n) {
  auto phase = [a, b, lod](double w) {
    return a * w + b * std::log1p(lod * w * w);
  };
  return band(density, phase, true, lo, std::min(w_star, hi), n) +
         band(density, phase, false, std::max(w_star, lo), hi, n);
}

namespace {

double sup_over_args(const symindex::SymbolModel& m, double y, double scale,
                     bool real_part, int dir_nodes) {
  symindex::PreparedSymbol ps = symindex::prepare_symbol(m, std::vector<double>{y});
  double best = -1e300;
  for (int j = 1; j <= dir_nodes; ++j) {
    const double eps = double(j) / double(dir_nodes);
    for (int side = -1; side <= 1; side += 2) {
      const std::vector<double> xi{side * eps / scale};
      symindex::SymbolValue v = ps.eval(xi, {}, nullptr);
      best = std::max(best, real_part ? v.re : std::hypot(v.re, v.im));
    }
  }
  return best;
}

}  // namespace

double grid_H_local(const symindex::SymbolModel& m, double x, double R,
                    int state_nodes, int dir_nodes) {
  if (symindex::model_dim(m) != 1)
    throw symindex::ValidationError("grid oracle handles scalar states only");
  double best = 0.0;
  for (int i = 0; i <= state_nodes; ++i) {
    const double y = x - 2.0 * R + 4.0 * R * double(i) / double(state_nodes);
    best = std::max(best, sup_over_args(m, y, R, false, dir_nodes));
  }
  return best;
}

double grid_h_local(const symindex::SymbolModel& m, double x, double R, double kappa,
                    int state_nodes, int dir_nodes) {
  if (symindex::model_dim(m) != 1)
    throw symindex::ValidationError("grid oracle handles scalar states only");
  double best = 1e300;
  for (int i = 0; i <= state_nodes; ++i) {
    const double y = x - 2.0 * R + 4.0 * R * double(i) / double(state_nodes);
    best = std::min(best, sup_over_args(m, y, 4.0 * kappa * R, true, dir_nodes));
  }
  return best;
}

}  // namespace oracles
