#include "symindex/jump_kernel.hpp"

#include <cmath>
#include <string>

#include "symindex/errors.hpp"

namespace symindex {

namespace {

constexpr double kPi = 3.141592653589793;

double norm_of(std::span<const double> a) { return norm2(a); }

double mapped_xi(const MappedKernel& m, std::span<const double> xi) {
  if (m.a.size() != xi.size())
    throw ValidationError("mapped kernel direction has dimension " +
                          std::to_string(m.a.size()) + ", symbol argument has " +
                          std::to_string(xi.size()));
  return dot(m.a, xi);
}

}  // namespace

int kernel_dim(const JumpKernel& k) {
  return std::visit(
      [](const auto& kk) -> int {
        using T = std::decay_t<decltype(kk)>;
        if constexpr (std::is_same_v<T, NoJumps> || std::is_same_v<T, SymmetricStable>)
          return 0;
        else if constexpr (std::is_same_v<T, RadialDensity>)
          return kk.dim;
        else if constexpr (std::is_same_v<T, MappedKernel>)
          return static_cast<int>(kk.a.size());
        else if constexpr (std::is_same_v<T, OpaqueKernel>)
          return kk.dim;
        else if constexpr (std::is_same_v<T, KernelSum>) {
          int d = 0;
          for (const auto& p : kk.parts) {
            int pd = kernel_dim(p);
            if (pd != 0 && d != 0 && pd != d)
              throw ValidationError("kernel sum mixes dimensions");
            if (pd != 0) d = pd;
          }
          return d;
        } else
          return 1;
      },
      k.v);
}

bool kernel_symmetric(const JumpKernel& k) {
  return std::visit(
      [](const auto& kk) -> bool {
        using T = std::decay_t<decltype(kk)>;
        if constexpr (std::is_same_v<T, NoJumps> || std::is_same_v<T, SymmetricStable> ||
                      std::is_same_v<T, VarianceGamma> || std::is_same_v<T, RadialDensity>)
          return true;
        else if constexpr (std::is_same_v<T, CompoundPoisson>)
          return kk.symmetric;
        else if constexpr (std::is_same_v<T, CustomDensity1D>)
          return kk.symmetric;
        else if constexpr (std::is_same_v<T, MappedKernel>)
          return kernel_symmetric(*kk.base);
        else if constexpr (std::is_same_v<T, OpaqueKernel>)
          return false;
        else {
          for (const auto& p : kk.parts)
            if (!kernel_symmetric(p)) return false;
          return true;
        }
      },
      k.v);
}

void validate_kernel(const JumpKernel& k, int dim) {
  std::visit(
      [dim](const auto& kk) {
        using T = std::decay_t<decltype(kk)>;
        if constexpr (std::is_same_v<T, NoJumps>) {
        } else if constexpr (std::is_same_v<T, CompoundPoisson>) {
          if (!(kk.intensity >= 0.0) || !std::isfinite(kk.intensity))
            throw ValidationError("compound Poisson intensity must be finite and >= 0");
          if (kk.intensity > 0.0 && !kk.jump_density)
            throw ValidationError("compound Poisson kernel needs a jump density");
          if (dim != 1) throw ValidationError("compound Poisson kernel is one-dimensional");
        } else if constexpr (std::is_same_v<T, SymmetricStable>) {
          if (!(kk.alpha > 0.0) || !(kk.alpha < 2.0))
            throw ValidationError("stable index must lie in (0, 2), got " +
                                  std::to_string(kk.alpha));
          if (!(kk.scale > 0.0)) throw ValidationError("stable scale must be positive");
        } else if constexpr (std::is_same_v<T, VarianceGamma>) {
          if (!(kk.c > 0.0))
            throw ValidationError("variance gamma parameter must be positive");
          if (dim != 1) throw ValidationError("variance gamma kernel is one-dimensional");
        } else if constexpr (std::is_same_v<T, RadialDensity>) {
          if (kk.dim < 1 || kk.dim > 3)
            throw ValidationError("radial kernels support dimensions 1..3");
          if (kk.dim != dim)
            throw ValidationError("radial kernel dimension disagrees with the model");
          if (!kk.profile) throw ValidationError("radial kernel needs a profile");
          if (kk.sing_order >= kk.dim + 2.0)
            throw ValidationError("radial profile too singular for a Levy measure");
        } else if constexpr (std::is_same_v<T, CustomDensity1D>) {
          if (dim != 1) throw ValidationError("custom scalar density is one-dimensional");
          if (!kk.density) throw ValidationError("custom kernel needs a density");
          if (kk.sing_order >= 3.0)
            throw ValidationError("scalar density too singular for a Levy measure");
        } else if constexpr (std::is_same_v<T, MappedKernel>) {
          if (!kk.base) throw ValidationError("mapped kernel has no base");
          if (static_cast<int>(kk.a.size()) != dim)
            throw ValidationError("mapped kernel direction disagrees with the model");
          if (norm2(kk.a) == 0.0)
            throw ValidationError("mapped kernel direction must be nonzero");
          int bd = kernel_dim(*kk.base);
          if (bd != 0 && bd != 1)
            throw ValidationError("mapped kernel base must be one-dimensional");
          validate_kernel(*kk.base, 1);
        } else if constexpr (std::is_same_v<T, OpaqueKernel>) {
          if (!kk.integral) throw ValidationError("opaque kernel has no integral rule");
          if (kk.dim != dim)
            throw ValidationError("opaque kernel dimension disagrees with the model");
        } else {
          if (kk.parts.empty()) throw ValidationError("kernel sum is empty");
          for (const auto& p : kk.parts) validate_kernel(p, dim);
        }
      },
      k.v);
}

double stable_density_constant(int dim, double alpha) {
  // makes \int (1 - cos(y'xi)) c |y|^{-d-alpha} dy = |xi|^alpha
  return alpha * std::pow(2.0, alpha - 1.0) * std::tgamma(0.5 * (dim + alpha)) /
         (std::pow(kPi, 0.5 * dim) * std::tgamma(1.0 - 0.5 * alpha));
}

std::optional<WeightedDensity1D> kernel_density_1d(const JumpKernel& k) {
  using R = std::optional<WeightedDensity1D>;
  return std::visit(
      [&k](const auto& kk) -> R {
        using T = std::decay_t<decltype(kk)>;
        if constexpr (std::is_same_v<T, NoJumps>) {
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, CompoundPoisson>) {
          WeightedDensity1D w;
          const double lam = kk.intensity;
          auto f = kk.jump_density;
          w.density = [lam, f](double y) { return lam * f(y); };
          w.symmetric = kk.symmetric;
          w.breakpoints = kk.breakpoints;
          return w;
        } else if constexpr (std::is_same_v<T, SymmetricStable>) {
          WeightedDensity1D w;
          const double c = stable_density_constant(1, kk.alpha) * std::pow(kk.scale, kk.alpha);
          const double p = 1.0 + kk.alpha;
          w.density = [c, p](double y) { return c * std::pow(std::abs(y), -p); };
          w.sing_order = p;
          w.symmetric = true;
          w.exact_sing_coef = c;
          w.exact_tail_coef = c;
          w.exact_tail_order = p;
          return w;
        } else if constexpr (std::is_same_v<T, VarianceGamma>) {
          WeightedDensity1D w;
          const double c = kk.c;
          const double rate = 1.0 / std::sqrt(2.0 * c);
          w.density = [c, rate](double y) {
            const double a = std::abs(y);
            return c / a * std::exp(-rate * a);
          };
          w.sing_order = 1.0;
          w.symmetric = true;
          w.exact_sing_coef = c;
          return w;
        } else if constexpr (std::is_same_v<T, RadialDensity>) {
          if (kk.dim != 1) return std::nullopt;
          WeightedDensity1D w;
          auto prof = kk.profile;
          w.density = [prof](double y) { return prof(std::abs(y)); };
          w.sing_order = kk.sing_order;
          w.symmetric = true;
          w.breakpoints = kk.breakpoints;
          w.exact_sing_coef = kk.exact_sing_coef;
          w.exact_tail_coef = kk.exact_tail_coef;
          w.exact_tail_order = kk.exact_tail_order;
          return w;
        } else if constexpr (std::is_same_v<T, CustomDensity1D>) {
          WeightedDensity1D w;
          w.density = kk.density;
          w.sing_order = kk.sing_order;
          w.symmetric = kk.symmetric;
          w.breakpoints = kk.breakpoints;
          w.exact_sing_coef = kk.exact_sing_coef;
          w.exact_tail_coef = kk.exact_tail_coef;
          w.exact_tail_order = kk.exact_tail_order;
          return w;
        } else if constexpr (std::is_same_v<T, MappedKernel>) {
          if (kk.a.size() != 1) return std::nullopt;
          auto base = kernel_density_1d(*kk.base);
          if (!base) return std::nullopt;
          const double a = kk.a[0];
          const double aa = std::abs(a);
          WeightedDensity1D w;
          auto bd = base->density;
          w.density = [bd, a, aa](double y) { return bd(y / a) / aa; };
          w.sing_order = base->sing_order;
          w.symmetric = base->symmetric;
          for (double b : base->breakpoints) w.breakpoints.push_back(b * aa);
          if (base->exact_sing_coef)
            w.exact_sing_coef = *base->exact_sing_coef * std::pow(aa, base->sing_order - 1.0);
          if (base->exact_tail_coef && base->exact_tail_order) {
            w.exact_tail_coef =
                *base->exact_tail_coef * std::pow(aa, *base->exact_tail_order - 1.0);
            w.exact_tail_order = base->exact_tail_order;
          }
          return w;
        } else if constexpr (std::is_same_v<T, OpaqueKernel>) {
          return std::nullopt;
        } else {
          if (kernel_dim(k) > 1) return std::nullopt;
          std::vector<WeightedDensity1D> ws;
          for (const auto& p : kk.parts) {
            auto w = kernel_density_1d(p);
            if (w) ws.push_back(*w);
          }
          if (ws.empty()) return std::nullopt;
          if (ws.size() == 1) return ws[0];
          WeightedDensity1D w;
          double sing = 0.0;
          bool sym = true;
          for (const auto& part : ws) {
            sing = std::max(sing, part.sing_order);
            sym = sym && part.symmetric;
            w.breakpoints.insert(w.breakpoints.end(), part.breakpoints.begin(),
                                 part.breakpoints.end());
          }
          w.density = [ws](double y) {
            double s = 0.0;
            for (const auto& part : ws) s += part.density(y);
            return s;
          };
          w.sing_order = sing;
          w.symmetric = sym;
          return w;
        }
      },
      k.v);
}

Cplx jump_symbol_integral(const JumpKernel& k, std::span<const double> xi,
                          const CutoffFunction& chi, const QuadOptions& opt,
                          double* abs_err) {
  if (abs_err) *abs_err = 0.0;
  return std::visit(
      [&](const auto& kk) -> Cplx {
        using T = std::decay_t<decltype(kk)>;
        if constexpr (std::is_same_v<T, NoJumps>) {
          return {0.0, 0.0};
        } else if constexpr (std::is_same_v<T, SymmetricStable>) {
          const double n = norm_of(xi);
          return {-std::pow(kk.scale, kk.alpha) * std::pow(n, kk.alpha), 0.0};
        } else if constexpr (std::is_same_v<T, RadialDensity>) {
          WeightedDensity1D prof;
          prof.density = kk.profile;
          prof.sing_order = kk.sing_order;
          prof.breakpoints = kk.breakpoints;
          prof.exact_sing_coef = kk.exact_sing_coef;
          prof.exact_tail_coef = kk.exact_tail_coef;
          prof.exact_tail_order = kk.exact_tail_order;
          QuadResult r = levy_khinchine_integral_radial(prof, kk.dim, norm_of(xi), opt);
          if (abs_err) *abs_err += r.abs_error;
          return r.value;
        } else if constexpr (std::is_same_v<T, MappedKernel>) {
          const double xe = mapped_xi(kk, xi);
          const double na = norm_of(kk.a);
          CutoffFunction eff{chi.radius / na};
          double e = 0.0;
          Cplx v = jump_symbol_integral(*kk.base, std::span<const double>(&xe, 1), eff, opt,
                                        &e);
          if (abs_err) *abs_err += e;
          return v;
        } else if constexpr (std::is_same_v<T, KernelSum>) {
          Cplx s{0.0, 0.0};
          for (const auto& p : kk.parts) {
            double e = 0.0;
            s += jump_symbol_integral(p, xi, chi, opt, &e);
            if (abs_err) *abs_err += e;
          }
          return s;
        } else if constexpr (std::is_same_v<T, OpaqueKernel>) {
          QuadResult r = kk.integral(xi, chi, opt);
          if (abs_err) *abs_err += r.abs_error;
          return r.value;
        } else {
          if (xi.size() != 1)
            throw ValidationError("scalar jump kernel evaluated with dimension " +
                                  std::to_string(xi.size()));
          auto w = kernel_density_1d(k);
          QuadResult r = levy_khinchine_integral_1d(*w, xi[0], chi.radius, opt);
          if (abs_err) *abs_err += r.abs_error;
          return r.value;
        }
      },
      k.v);
}

}  // namespace symindex
