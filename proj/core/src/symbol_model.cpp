#include "symindex/symbol_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "symindex/errors.hpp"
#include "symindex/jump_kernel.hpp"

namespace symindex {

namespace {

double clamped_alpha(const StableLikeFamily& f, double x) {
  return std::clamp(f.alpha(x), f.alpha_min, f.alpha_max);
}

void check_state(std::span<const double> x, int dim, const char* what) {
  if (static_cast<int>(x.size()) != dim)
    throw ValidationError(std::string(what) + ": state has dimension " +
                          std::to_string(x.size()) + ", model expects " +
                          std::to_string(dim));
  for (double v : x)
    if (!std::isfinite(v)) throw ValidationError(std::string(what) + ": state not finite");
}

// rows of Phi(x), validated to be d x n
std::vector<Vec> phi_matrix(const SdeComposedFamily& f, std::span<const double> x) {
  std::vector<Vec> rows = f.phi(x);
  if (static_cast<int>(rows.size()) != f.state_dim)
    throw ValidationError("coefficient matrix has " + std::to_string(rows.size()) +
                          " rows, expected " + std::to_string(f.state_dim));
  for (const Vec& r : rows)
    if (static_cast<int>(r.size()) != f.driver.dim)
      throw ValidationError("coefficient matrix row has " + std::to_string(r.size()) +
                            " entries, driver dimension is " +
                            std::to_string(f.driver.dim));
  return rows;
}

Vec transposed_apply(const std::vector<Vec>& rows, std::span<const double> xi) {
  const std::size_t n = rows.empty() ? 0 : rows[0].size();
  Vec eta(n, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) eta[j] += rows[i][j] * xi[i];
  return eta;
}

Vec matrix_apply(const std::vector<Vec>& rows, std::span<const double> v) {
  Vec out(rows.size(), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += rows[i][j] * v[j];
  return out;
}

// \int_{lo <= |w| <= hi} w N(dw) for a scalar kernel given by its density.
// Re-compensation of the drift when a scalar jump w c (column c in R^d, w from a
// one-dimensional base measure) switches from the driver indicator |w| <= r_driver to
// the model ball of radius rc: c * \int w (1_{|w| <= rc/|c|} - 1_{|w| <= r_driver}) N.
Vec pushed_drift_correction(const WeightedDensity1D& dens, const Vec& c, double r_driver,
                            double rc) {
  const double cn = norm2(c);
  Vec out(c.size(), 0.0);
  if (cn == 0.0 || dens.symmetric) return out;
  const double r_model = rc / cn;
  const double lo = std::min(r_model, r_driver), hi = std::max(r_model, r_driver);
  const double sign = r_model > r_driver ? 1.0 : -1.0;
  const double jw =
      sign * first_moment_in_band(dens, lo, hi, QuadOptions{1e-12, 40000}, nullptr);
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i] * jw;
  return out;
}

struct PushedKernel {
  JumpKernel kernel{NoJumps{}};
  Vec drift_correction;
};

// Image of a driver kernel under y -> A y together with the drift re-compensation to
// the model ball of radius rc. r_driver is the driver cut-off radius.
PushedKernel push_kernel(const JumpKernel& k, const std::vector<Vec>& a, int out_dim,
                         double r_driver, double rc) {
  PushedKernel out;
  out.drift_correction.assign(out_dim, 0.0);
  const int n = a.empty() ? 0 : static_cast<int>(a[0].size());

  if (std::holds_alternative<NoJumps>(k.v)) return out;

  if (const auto* sum = std::get_if<KernelSum>(&k.v)) {
    std::vector<JumpKernel> parts;
    for (const JumpKernel& part : sum->parts) {
      PushedKernel p = push_kernel(part, a, out_dim, r_driver, rc);
      if (!std::holds_alternative<NoJumps>(p.kernel.v)) parts.push_back(std::move(p.kernel));
      for (int i = 0; i < out_dim; ++i) out.drift_correction[i] += p.drift_correction[i];
    }
    if (parts.empty()) return out;
    out.kernel = parts.size() == 1 ? std::move(parts[0]) : JumpKernel{KernelSum{std::move(parts)}};
    return out;
  }

  if (const auto* mapped = std::get_if<MappedKernel>(&k.v)) {
    // jumps live on the line R * mapped->a; the image line is R * (A a)
    Vec col = matrix_apply(a, mapped->a);
    if (norm2(col) == 0.0) return out;
    auto base_dens = kernel_density_1d(*mapped->base);
    if (base_dens && !base_dens->symmetric) {
      const double an = norm2(mapped->a);
      out.drift_correction =
          pushed_drift_correction(*base_dens, col, an > 0.0 ? r_driver / an : r_driver, rc);
    }
    out.kernel = JumpKernel{MappedKernel{mapped->base, std::move(col)}};
    return out;
  }

  if (const auto* st = std::get_if<SymmetricStable>(&k.v); st && n > 1) {
    // isotropic driver: representable only when A A' is a multiple of the identity
    std::vector<Vec> gram(out_dim, Vec(out_dim, 0.0));
    for (int i = 0; i < out_dim; ++i)
      for (int j = 0; j < out_dim; ++j)
        for (int l = 0; l < n; ++l) gram[i][j] += a[i][l] * a[j][l];
    double diag = gram[0][0];
    double dev = 0.0;
    for (int i = 0; i < out_dim; ++i)
      for (int j = 0; j < out_dim; ++j)
        dev = std::max(dev, std::abs(gram[i][j] - (i == j ? diag : 0.0)));
    if (diag == 0.0) return out;
    if (dev > 1e-12 * std::max(diag, 1.0))
      throw ValidationError(
          "image of an isotropic stable driver is representable only through a scaled "
          "isometry");
    out.kernel = JumpKernel{SymmetricStable{st->alpha, st->scale * std::sqrt(diag)}};
    return out;
  }

  if (n == 1 && kernel_dim(k) <= 1) {
    Vec col(out_dim, 0.0);
    for (int i = 0; i < out_dim; ++i) col[i] = a[i][0];
    if (norm2(col) == 0.0) return out;
    auto dens = kernel_density_1d(k);
    if (dens && !dens->symmetric)
      out.drift_correction = pushed_drift_correction(*dens, col, r_driver, rc);
    if (out_dim == 1 && col[0] == 1.0)
      out.kernel = k;
    else
      out.kernel = JumpKernel{MappedKernel{std::make_shared<JumpKernel>(k), std::move(col)}};
    return out;
  }

  throw ValidationError(
      "pushforward of this jump kernel through a general coefficient matrix is not "
      "supported");
}

}  // namespace

int model_dim(const SymbolModel& m) {
  return std::visit(
      [](const auto& f) -> int {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LevyFamily>) {
          return f.triplet.dim;
        } else if constexpr (std::is_same_v<T, StableLikeFamily>) {
          return 1;
        } else if constexpr (std::is_same_v<T, SdeComposedFamily>) {
          return f.state_dim;
        } else if constexpr (std::is_same_v<T, CogarchFamily>) {
          return 2;
        } else if constexpr (std::is_same_v<T, SumIndependentFamily>) {
          int d = 0;
          for (const auto& c : f.components) d += c ? model_dim(*c) : 0;
          return d;
        } else {
          return f.dim;
        }
      },
      m.family);
}

void validate_model(const SymbolModel& m) {
  m.cutoff.validate();
  std::visit(
      [&m](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LevyFamily>) {
          validate_triplet(f.triplet);
        } else if constexpr (std::is_same_v<T, StableLikeFamily>) {
          if (!f.alpha) throw ValidationError("stable-like model has no index function");
          if (!(f.alpha_min > 0.0) || !(f.alpha_max < 2.0) || f.alpha_min > f.alpha_max)
            throw ValidationError("stable-like index bounds must satisfy 0 < lo <= hi < 2");
          if (!(f.scale > 0.0) || !std::isfinite(f.scale))
            throw ValidationError("stable-like scale must be positive");
        } else if constexpr (std::is_same_v<T, SdeComposedFamily>) {
          validate_triplet(f.driver);
          if (f.state_dim < 1) throw ValidationError("state dimension must be >= 1");
          if (!f.phi) throw ValidationError("composed model has no coefficient function");
        } else if constexpr (std::is_same_v<T, CogarchFamily>) {
          if (!f.evaluator) throw ValidationError("cogarch model has no evaluator");
        } else if constexpr (std::is_same_v<T, SumIndependentFamily>) {
          if (f.components.empty())
            throw ValidationError("independent sum needs at least one component");
          for (const auto& c : f.components) {
            if (!c) throw ValidationError("independent sum has a null component");
            validate_model(*c);
            if (c->cutoff.radius != m.cutoff.radius)
              throw ValidationError(
                  "independent-sum components must share the parent cut-off radius");
          }
        } else {
          if (f.dim < 1) throw ValidationError("state dimension must be >= 1");
          if (!f.at) throw ValidationError("custom model has no triplet function");
        }
      },
      m.family);
}

std::vector<bool> state_dependency_mask(const SymbolModel& m) {
  return std::visit(
      [&m](const auto& f) -> std::vector<bool> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LevyFamily>) {
          return std::vector<bool>(f.triplet.dim, false);
        } else if constexpr (std::is_same_v<T, StableLikeFamily>) {
          return {true};
        } else if constexpr (std::is_same_v<T, SdeComposedFamily>) {
          return std::vector<bool>(f.state_dim, !f.state_free);
        } else if constexpr (std::is_same_v<T, CogarchFamily>) {
          return {false, true};
        } else if constexpr (std::is_same_v<T, SumIndependentFamily>) {
          std::vector<bool> mask;
          for (const auto& c : f.components) {
            auto part = state_dependency_mask(*c);
            mask.insert(mask.end(), part.begin(), part.end());
          }
          return mask;
        } else {
          return std::vector<bool>(f.dim, !f.state_free);
        }
      },
      m.family);
}

bool is_state_free(const SymbolModel& m) {
  auto mask = state_dependency_mask(m);
  return std::none_of(mask.begin(), mask.end(), [](bool b) { return b; });
}

GlobalSupKind global_sup_kind(const SymbolModel& m) {
  if (is_state_free(m)) return GlobalSupKind::StateFree;
  if (std::holds_alternative<StableLikeFamily>(m.family))
    return GlobalSupKind::StableLikeBounds;
  return GlobalSupKind::NeedsDomain;
}

PreparedSymbol prepare_symbol(const SymbolModel& m, std::span<const double> x,
                              const QuadOptions& opt) {
  const int dim = model_dim(m);
  check_state(x, dim, "prepare_symbol");
  PreparedSymbol ps;
  ps.dim = dim;
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LevyFamily>) {
          LevyTriplet t = f.triplet;
          t.cutoff = m.cutoff;
          ps.eval = [t](std::span<const double> xi, const QuadOptions& o, double* e) {
            return levy_symbol(t, xi, o, e);
          };
        } else if constexpr (std::is_same_v<T, StableLikeFamily>) {
          const double a = clamped_alpha(f, x[0]);
          const double s = f.scale;
          ps.eval = [a, s](std::span<const double> xi, const QuadOptions&, double* e) {
            if (xi.size() != 1)
              throw ValidationError("stable-like symbol takes a scalar argument");
            if (e) *e = 0.0;
            return SymbolValue{std::pow(s * std::abs(xi[0]), a), 0.0};
          };
        } else if constexpr (std::is_same_v<T, SdeComposedFamily>) {
          std::vector<Vec> rows = phi_matrix(f, x);
          LevyTriplet driver = f.driver;
          ps.eval = [rows, driver](std::span<const double> xi, const QuadOptions& o,
                                   double* e) {
            Vec eta = transposed_apply(rows, xi);
            return levy_symbol(driver, eta, o, e);
          };
        } else if constexpr (std::is_same_v<T, CogarchFamily>) {
          CogarchPrepared st = f.evaluator->prepare(x[1], opt);
          ps.eval = [st](std::span<const double> xi, const QuadOptions& o, double* e) {
            return CogarchEvaluator::eval(st, xi, o, e);
          };
        } else if constexpr (std::is_same_v<T, SumIndependentFamily>) {
          auto parts = std::make_shared<std::vector<PreparedSymbol>>();
          std::size_t off = 0;
          for (const auto& c : f.components) {
            const int cd = model_dim(*c);
            parts->push_back(prepare_symbol(*c, x.subspan(off, cd), opt));
            off += cd;
          }
          ps.eval = [parts](std::span<const double> xi, const QuadOptions& o, double* e) {
            SymbolValue acc{0.0, 0.0};
            if (e) *e = 0.0;
            std::size_t off2 = 0;
            for (const PreparedSymbol& p : *parts) {
              double pe = 0.0;
              SymbolValue v = p.eval(xi.subspan(off2, p.dim), o, e ? &pe : nullptr);
              acc.re += v.re;
              acc.im += v.im;
              if (e) *e += pe;
              off2 += p.dim;
            }
            return acc;
          };
        } else {
          LevyTriplet t = f.at(x);
          if (t.dim != f.dim)
            throw ValidationError("custom triplet dimension disagrees with the model");
          t.cutoff = m.cutoff;
          ps.eval = [t](std::span<const double> xi, const QuadOptions& o, double* e) {
            return levy_symbol(t, xi, o, e);
          };
        }
      },
      m.family);
  return ps;
}

SymbolValue eval_symbol(const SymbolModel& m, std::span<const double> x,
                        std::span<const double> xi, const QuadOptions& opt,
                        double* abs_err) {
  if (xi.size() != x.size())
    throw ValidationError("state and argument dimensions disagree");
  return prepare_symbol(m, x, opt).eval(xi, opt, abs_err);
}

SymbolValue sum_symbol(const SumIndependentFamily& f, std::span<const double> x,
                       std::span<const double> xi, const QuadOptions& opt,
                       double* abs_err) {
  if (x.size() != xi.size())
    throw ValidationError("state and argument dimensions disagree");
  SymbolValue acc{0.0, 0.0};
  if (abs_err) *abs_err = 0.0;
  std::size_t off = 0;
  for (const auto& c : f.components) {
    if (!c) throw ValidationError("independent sum has a null component");
    const int cd = model_dim(*c);
    if (off + cd > x.size())
      throw ValidationError("component dimensions exceed the state dimension");
    double pe = 0.0;
    SymbolValue v =
        eval_symbol(*c, x.subspan(off, cd), xi.subspan(off, cd), opt, abs_err ? &pe : nullptr);
    acc.re += v.re;
    acc.im += v.im;
    if (abs_err) *abs_err += pe;
    off += cd;
  }
  if (off != x.size())
    throw ValidationError("component dimensions do not partition the state");
  return acc;
}

LevyTriplet differential_characteristics(const SymbolModel& m, std::span<const double> x,
                                         const QuadOptions& opt) {
  const int dim = model_dim(m);
  check_state(x, dim, "differential_characteristics");
  return std::visit(
      [&](const auto& f) -> LevyTriplet {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LevyFamily>) {
          LevyTriplet t = f.triplet;
          t.cutoff = m.cutoff;
          return t;
        } else if constexpr (std::is_same_v<T, StableLikeFamily>) {
          LevyTriplet t;
          t.dim = 1;
          t.cutoff = m.cutoff;
          t.jumps = JumpKernel{SymmetricStable{clamped_alpha(f, x[0]), f.scale}};
          return t;
        } else if constexpr (std::is_same_v<T, SdeComposedFamily>) {
          std::vector<Vec> rows = phi_matrix(f, x);
          LevyTriplet t;
          t.dim = f.state_dim;
          t.cutoff = m.cutoff;
          Vec lz(f.driver.dim, 0.0);
          for (std::size_t j = 0; j < f.driver.drift.size(); ++j) lz[j] = f.driver.drift[j];
          t.drift = matrix_apply(rows, lz);
          if (!f.driver.diffusion.empty()) {
            // A Q A'
            const int n = f.driver.dim;
            t.diffusion.assign(dim, Vec(dim, 0.0));
            for (int i = 0; i < dim; ++i)
              for (int j = 0; j < dim; ++j)
                for (int k = 0; k < n; ++k)
                  for (int l = 0; l < n; ++l)
                    t.diffusion[i][j] += rows[i][k] * f.driver.diffusion[k][l] * rows[j][l];
          }
          PushedKernel pk = push_kernel(f.driver.jumps, rows, dim,
                                        f.driver.cutoff.radius, m.cutoff.radius);
          t.jumps = std::move(pk.kernel);
          for (int i = 0; i < dim; ++i) t.drift[i] += pk.drift_correction[i];
          return t;
        } else if constexpr (std::is_same_v<T, CogarchFamily>) {
          return f.evaluator->characteristics(x[1], m.cutoff, opt);
        } else if constexpr (std::is_same_v<T, SumIndependentFamily>) {
          LevyTriplet t;
          t.dim = dim;
          t.cutoff = m.cutoff;
          t.drift.assign(dim, 0.0);
          std::vector<JumpKernel> parts;
          bool any_q = false;
          std::size_t off = 0;
          for (const auto& c : f.components) {
            const int cd = model_dim(*c);
            LevyTriplet ct = differential_characteristics(*c, x.subspan(off, cd), opt);
            for (int i = 0; i < cd; ++i)
              t.drift[off + i] = ct.drift.empty() ? 0.0 : ct.drift[i];
            if (!ct.diffusion.empty()) {
              if (!any_q) t.diffusion.assign(dim, Vec(dim, 0.0));
              any_q = true;
              for (int i = 0; i < cd; ++i)
                for (int j = 0; j < cd; ++j) t.diffusion[off + i][off + j] = ct.diffusion[i][j];
            }
            if (!std::holds_alternative<NoJumps>(ct.jumps.v)) {
              if (cd != 1)
                throw ValidationError(
                    "only scalar component jump kernels can be embedded into an "
                    "independent sum");
              Vec e(dim, 0.0);
              e[off] = 1.0;
              parts.push_back(JumpKernel{
                  MappedKernel{std::make_shared<JumpKernel>(std::move(ct.jumps)), std::move(e)}});
            }
            off += cd;
          }
          if (parts.size() == 1)
            t.jumps = std::move(parts[0]);
          else if (!parts.empty())
            t.jumps = JumpKernel{KernelSum{std::move(parts)}};
          return t;
        } else {
          LevyTriplet t = f.at(x);
          if (t.dim != f.dim)
            throw ValidationError("custom triplet dimension disagrees with the model");
          t.cutoff = m.cutoff;
          return t;
        }
      },
      m.family);
}

SymbolModel make_circle_flow_model() {
  CustomTripletFamily f;
  f.dim = 2;
  f.state_free = false;
  f.at = [](std::span<const double> x) -> LevyTriplet {
    LevyTriplet t;
    t.dim = 2;
    const double up = x[0] * x[0] + (1.0 - x[1]) * (1.0 - x[1]) - 1.0;
    const double lo = x[0] * x[0] + (1.0 + x[1]) * (1.0 + x[1]) - 1.0;
    if (std::abs(up) <= 1e-9)
      t.drift = {1.0 - x[1], x[0]};
    else if (std::abs(lo) <= 1e-9)
      t.drift = {x[1] + 1.0, -x[0]};
    else
      t.drift = {0.0, 0.0};
    return t;
  };
  SymbolModel m;
  m.family = std::move(f);
  return m;
}

}  // namespace symindex
