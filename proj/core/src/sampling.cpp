#include "symindex/sampling.hpp"

#include <cmath>
#include <utility>
#include <variant>

#include <Eigen/Dense>

#include "symindex/errors.hpp"
#include "symindex/jump_kernel.hpp"

namespace symindex {
namespace {

// Raw scalar jump sampler for a one-dimensional kernel, together with the small-jump
// mean \int_{|w| <= rc} w N(dw) that the raw draws leave uncompensated. The stable and
// variance-gamma draws are exact in law for the symmetric symbol, so only compound
// Poisson parts contribute a correction.
struct ScalarPart {
  std::function<double(double, PathRng&)> draw;
  double comp = 0.0;
};

[[noreturn]] void throw_unsupported() {
  throw ValidationError(
      "this jump kernel is integration-only and cannot be sampled; provide a "
      "CompoundPoisson draw function or use a closed-form kernel");
}

ScalarPart build_scalar(const JumpKernel& k, double rc, const QuadOptions& opt) {
  using T = ScalarPart;
  return std::visit(
      [rc, &opt](const auto& kk) -> T {
        using K = std::decay_t<decltype(kk)>;
        if constexpr (std::is_same_v<K, NoJumps>) {
          return {[](double, PathRng&) { return 0.0; }, 0.0};
        } else if constexpr (std::is_same_v<K, CompoundPoisson>) {
          if (!kk.draw)
            throw ValidationError(
                "compound Poisson kernel has no draw function and cannot be sampled");
          ScalarPart p;
          const double lam = kk.intensity;
          auto jump = kk.draw;
          p.draw = [lam, jump](double dt, PathRng& rng) {
            double s = 0.0;
            const long n = rng.poisson(lam * dt);
            for (long i = 0; i < n; ++i) s += jump(rng);
            return s;
          };
          if (!kk.symmetric) {
            auto dens = kernel_density_1d(JumpKernel{kk});
            if (!dens || !dens->density)
              throw ValidationError(
                  "asymmetric compound Poisson kernel needs a jump density to "
                  "compensate small jumps");
            p.comp = first_moment_in_band(*dens, 0.0, rc, opt, nullptr);
          }
          return p;
        } else if constexpr (std::is_same_v<K, SymmetricStable>) {
          const double alpha = kk.alpha;
          const double scale = kk.scale;
          return {[alpha, scale](double dt, PathRng& rng) {
                    return scale * std::pow(dt, 1.0 / alpha) *
                           rng.symmetric_stable(alpha);
                  },
                  0.0};
        } else if constexpr (std::is_same_v<K, VarianceGamma>) {
          const double c = kk.c;
          const double th = std::sqrt(2.0 * c);
          return {[c, th](double dt, PathRng& rng) {
                    const double gp = rng.gamma(c * dt);
                    const double gm = rng.gamma(c * dt);
                    return th * (gp - gm);
                  },
                  0.0};
        } else if constexpr (std::is_same_v<K, MappedKernel>) {
          const double a = kk.a.empty() ? 0.0 : kk.a[0];
          if (a == 0.0) return {[](double, PathRng&) { return 0.0; }, 0.0};
          ScalarPart base = build_scalar(*kk.base, rc / std::abs(a), opt);
          auto bd = std::move(base.draw);
          return {[a, bd](double dt, PathRng& rng) { return a * bd(dt, rng); },
                  a * base.comp};
        } else if constexpr (std::is_same_v<K, KernelSum>) {
          ScalarPart p;
          std::vector<ScalarPart> parts;
          parts.reserve(kk.parts.size());
          for (const auto& part : kk.parts) {
            if (std::holds_alternative<NoJumps>(part.v)) continue;
            parts.push_back(build_scalar(part, rc, opt));
            p.comp += parts.back().comp;
          }
          p.draw = [parts](double dt, PathRng& rng) {
            double s = 0.0;
            for (const auto& q : parts) s += q.draw(dt, rng);
            return s;
          };
          return p;
        } else {
          throw_unsupported();
        }
      },
      k.v);
}

}  // namespace

void IncrementSampler::add_kernel(const JumpKernel& k, double rc,
                                  const QuadOptions& opt) {
  if (std::holds_alternative<NoJumps>(k.v)) return;
  if (const auto* sum = std::get_if<KernelSum>(&k.v); sum && dim_ > 1) {
    for (const auto& part : sum->parts) add_kernel(part, rc, opt);
    return;
  }
  if (const auto* st = std::get_if<SymmetricStable>(&k.v); st && dim_ > 1) {
    // Subordinated Gaussian: X = sqrt(2 A) G with A = (dt scale^alpha)^{2/alpha} S,
    // S positive (alpha/2)-stable, matches exp(-dt scale^alpha |xi|^alpha).
    const double alpha = st->alpha;
    const double s2 = st->scale * st->scale;
    const int d = dim_;
    jump_parts_.push_back([alpha, s2, d](double dt, PathRng& rng, Vec& out) {
      const double a = s2 * std::pow(dt, 2.0 / alpha) * rng.positive_stable(0.5 * alpha);
      const double s = std::sqrt(2.0 * a);
      for (int i = 0; i < d; ++i) out[i] += s * rng.normal();
    });
    return;
  }
  if (const auto* mp = std::get_if<MappedKernel>(&k.v); mp && dim_ > 1) {
    const Vec a = mp->a;
    const double an = norm2(a);
    if (an == 0.0) return;
    ScalarPart sp = build_scalar(*mp->base, rc / an, opt);
    for (int i = 0; i < dim_; ++i) drift_[i] -= a[i] * sp.comp;
    auto draw = std::move(sp.draw);
    jump_parts_.push_back([a, draw](double dt, PathRng& rng, Vec& out) {
      const double w = draw(dt, rng);
      for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i] * w;
    });
    return;
  }
  if (dim_ != 1) throw_unsupported();
  ScalarPart sp = build_scalar(k, rc, opt);
  drift_[0] -= sp.comp;
  auto draw = std::move(sp.draw);
  jump_parts_.push_back(
      [draw](double dt, PathRng& rng, Vec& out) { out[0] += draw(dt, rng); });
}

IncrementSampler::IncrementSampler(const LevyTriplet& t, const QuadOptions& opt) {
  validate_triplet(t);
  dim_ = t.dim;
  drift_.assign(dim_, 0.0);
  for (std::size_t i = 0; i < t.drift.size(); ++i) drift_[i] = t.drift[i];
  if (!t.diffusion.empty()) {
    Eigen::MatrixXd q(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) q(i, j) = t.diffusion[i][j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
    if (es.info() != Eigen::Success)
      throw NumericError("diffusion matrix eigendecomposition failed");
    for (int j = 0; j < dim_; ++j) {
      const double lam = es.eigenvalues()[j];
      if (lam <= 0.0) continue;
      Vec col(dim_);
      const double s = std::sqrt(lam);
      for (int i = 0; i < dim_; ++i) col[i] = s * es.eigenvectors()(i, j);
      gauss_cols_.push_back(std::move(col));
    }
  }
  add_kernel(t.jumps, t.cutoff.radius, opt);
}

void IncrementSampler::sample(double dt, PathRng& rng, Vec& out) const {
  if (!(dt > 0.0)) throw ValidationError("increment length dt must be positive");
  out.assign(dim_, 0.0);
  for (int i = 0; i < dim_; ++i) out[i] = drift_[i] * dt;
  const double sd = std::sqrt(dt);
  for (const Vec& col : gauss_cols_) {
    const double g = sd * rng.normal();
    for (int i = 0; i < dim_; ++i) out[i] += col[i] * g;
  }
  for (const auto& part : jump_parts_) part(dt, rng, out);
}

Vec IncrementSampler::operator()(double dt, PathRng& rng) const {
  Vec out;
  sample(dt, rng, out);
  return out;
}

Vec sample_levy_increment(const LevyTriplet& t, double dt, PathRng& rng) {
  return IncrementSampler(t)(dt, rng);
}

}  // namespace symindex
