#include "symindex/levy_triplet.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "symindex/errors.hpp"

namespace symindex {

void validate_triplet(const LevyTriplet& t) {
  if (t.dim < 1) throw ValidationError("process dimension must be >= 1");
  if (!t.drift.empty() && static_cast<int>(t.drift.size()) != t.dim)
    throw ValidationError("drift has size " + std::to_string(t.drift.size()) +
                          ", expected " + std::to_string(t.dim));
  if (!t.diffusion.empty()) {
    if (static_cast<int>(t.diffusion.size()) != t.dim)
      throw ValidationError("diffusion matrix must be " + std::to_string(t.dim) + " x " +
                            std::to_string(t.dim));
    Eigen::MatrixXd q(t.dim, t.dim);
    for (int i = 0; i < t.dim; ++i) {
      if (static_cast<int>(t.diffusion[i].size()) != t.dim)
        throw ValidationError("diffusion matrix row " + std::to_string(i) +
                              " has wrong length");
      for (int j = 0; j < t.dim; ++j) q(i, j) = t.diffusion[i][j];
    }
    const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw ValidationError("diffusion matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
    if (es.eigenvalues().minCoeff() < -1e-12 * scale)
      throw ValidationError("diffusion matrix must be positive semidefinite (min eigenvalue " +
                            std::to_string(es.eigenvalues().minCoeff()) + ")");
  }
  t.cutoff.validate();
  validate_kernel(t.jumps, t.dim);
}

double quadratic_form(const std::vector<Vec>& q, std::span<const double> xi) {
  if (q.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q[i].size(); ++j) s += xi[i] * q[i][j] * xi[j];
  return s;
}

SymbolValue levy_symbol(const LevyTriplet& t, std::span<const double> xi,
                        const QuadOptions& opt, double* abs_err) {
  if (static_cast<int>(xi.size()) != t.dim)
    throw ValidationError("symbol argument has dimension " + std::to_string(xi.size()) +
                          ", process has " + std::to_string(t.dim));
  Cplx p{0.0, 0.0};
  if (!t.drift.empty()) p += Cplx{0.0, -dot(t.drift, xi)};
  p += 0.5 * quadratic_form(t.diffusion, xi);
  double jerr = 0.0;
  p -= jump_symbol_integral(t.jumps, xi, t.cutoff, opt, &jerr);
  if (abs_err) *abs_err = jerr;
  return SymbolValue::from(p);
}

}  // namespace symindex
