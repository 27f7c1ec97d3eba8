#pragma once

#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "symindex/cogarch.hpp"
#include "symindex/levy_triplet.hpp"
#include "symindex/types.hpp"

namespace symindex {

struct SymbolModel;

// Levy process: constant triplet, symbol independent of the state.
struct LevyFamily {
  LevyTriplet triplet;
};

// One-dimensional stable-like process with state-dependent index,
// p(x, xi) = scale^alpha(x) |xi|^alpha(x). alpha is clamped to [alpha_min, alpha_max].
struct StableLikeFamily {
  std::function<double(double)> alpha;
  double alpha_min = 0.1;
  double alpha_max = 1.9;
  double scale = 1.0;
};

// Solution of dX = Phi(X-) dZ for an n-dimensional Levy driver with exponent psi:
// p(x, xi) = psi(Phi(x)' xi). phi returns the d rows of Phi(x), each of length n.
struct SdeComposedFamily {
  LevyTriplet driver;
  std::function<std::vector<Vec>(std::span<const double> x)> phi;
  int state_dim = 1;
  bool state_free = false;  // set when Phi is constant in x
};

struct CogarchFamily {
  std::shared_ptr<const CogarchEvaluator> evaluator;
};

// Independent components laid out side by side; the symbol is the sum of the
// component symbols at the matching slices of x and xi.
struct SumIndependentFamily {
  std::vector<std::shared_ptr<const SymbolModel>> components;
};

// Free-form state-dependent triplet. The returned triplet must be compensated with
// respect to the model cut-off.
struct CustomTripletFamily {
  int dim = 1;
  std::function<LevyTriplet(std::span<const double> x)> at;
  bool state_free = false;
};

struct SymbolModel {
  std::variant<LevyFamily, StableLikeFamily, SdeComposedFamily, CogarchFamily,
               SumIndependentFamily, CustomTripletFamily>
      family;
  CutoffFunction cutoff{};
};

// State-resolved symbol: all x-dependent quadratures are done once, evaluations at
// many xi reuse them. Safe to call concurrently.
struct PreparedSymbol {
  int dim = 1;
  std::function<SymbolValue(std::span<const double> xi, const QuadOptions& opt,
                            double* abs_err)>
      eval;
};

int model_dim(const SymbolModel& m);

// Throws ValidationError on inconsistent dimensions, out-of-range parameters, or
// mismatched component cut-offs.
void validate_model(const SymbolModel& m);

// Which coordinates of x the symbol actually depends on.
std::vector<bool> state_dependency_mask(const SymbolModel& m);

bool is_state_free(const SymbolModel& m);

// How a supremum of |p(y, .)| over all states y can be taken:
//   StateFree        - the symbol does not depend on y at all;
//   StableLikeBounds - p = scale^a |xi|^a with a in [alpha_min, alpha_max], the
//                      envelope over a is available in closed form;
//   NeedsDomain      - no structure to exploit, a finite search domain is required.
enum class GlobalSupKind { StateFree, StableLikeBounds, NeedsDomain };
GlobalSupKind global_sup_kind(const SymbolModel& m);

PreparedSymbol prepare_symbol(const SymbolModel& m, std::span<const double> x,
                              const QuadOptions& opt = {});

SymbolValue eval_symbol(const SymbolModel& m, std::span<const double> x,
                        std::span<const double> xi, const QuadOptions& opt = {},
                        double* abs_err = nullptr);

// Sum of the component symbols at the component slices of x and xi.
SymbolValue sum_symbol(const SumIndependentFamily& f, std::span<const double> x,
                       std::span<const double> xi, const QuadOptions& opt = {},
                       double* abs_err = nullptr);

// Triplet at x whose Levy-Khinchine form with respect to the model cut-off equals the
// symbol. For SdeComposed families the driver triplet is pushed through A = Phi(x):
// drift A ell_Z plus re-compensation, diffusion A Q_Z A', and the image jump kernel;
// only scalar drivers (through a column map) and isotropic stable drivers through
// scaled isometries are representable, anything else is rejected.
LevyTriplet differential_characteristics(const SymbolModel& m, std::span<const double> x,
                                         const QuadOptions& opt = {});

// Deterministic circle flow: mass moves along the circle through 0 centered at
// (0, 1), then along the mirrored circle centered at (0, -1), with period 4 pi. The
// drift is (1 - x2, x1) on the first circle and (x2 + 1, -x1) on the second; states
// off the two circles are absorbing.
SymbolModel make_circle_flow_model();

}  // namespace symindex
