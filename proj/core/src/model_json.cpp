#include "symindex/model_json.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <set>
#include <utility>

#include "json.hpp"

#include "symindex/cogarch.hpp"
#include "symindex/errors.hpp"
#include "symindex/rng.hpp"

namespace symindex {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ValidationError("config field '" + (path.empty() ? "(root)" : path) +
                        "': " + msg);
}

// View of one config object: typed getters with defaults, strict key checking,
// error messages carrying the full path.
struct Cur {
  const json* node = nullptr;
  std::string path;

  std::string sub(const std::string& k) const {
    return path.empty() ? k : path + "." + k;
  }
  bool has(const char* k) const { return node->contains(k); }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& item : node->items())
      if (!ok.count(item.key())) fail(sub(item.key()), "unknown key");
  }

  Cur child(const char* k) const {
    if (!has(k)) fail(sub(k), "missing required object");
    const json& j = (*node)[k];
    if (!j.is_object()) fail(sub(k), "must be an object");
    return {&j, sub(k)};
  }

  double num(const char* k, std::optional<double> def = std::nullopt) const {
    if (!has(k)) {
      if (def) return *def;
      fail(sub(k), "missing required number");
    }
    const json& j = (*node)[k];
    if (!j.is_number()) fail(sub(k), "must be a number");
    return j.get<double>();
  }

  long integer(const char* k, std::optional<long> def = std::nullopt) const {
    if (!has(k)) {
      if (def) return *def;
      fail(sub(k), "missing required integer");
    }
    const json& j = (*node)[k];
    if (!j.is_number_integer()) fail(sub(k), "must be an integer");
    return j.get<long>();
  }

  std::uint64_t u64(const char* k, std::uint64_t def) const {
    if (!has(k)) return def;
    const json& j = (*node)[k];
    if (!(j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0)))
      fail(sub(k), "must be a non-negative integer");
    return j.get<std::uint64_t>();
  }

  std::string str(const char* k, std::optional<std::string> def = std::nullopt) const {
    if (!has(k)) {
      if (def) return *def;
      fail(sub(k), "missing required string");
    }
    const json& j = (*node)[k];
    if (!j.is_string()) fail(sub(k), "must be a string");
    return j.get<std::string>();
  }

  Vec vec(const char* k, std::optional<Vec> def = std::nullopt) const {
    if (!has(k)) {
      if (def) return *def;
      fail(sub(k), "missing required array of numbers");
    }
    const json& j = (*node)[k];
    if (!j.is_array()) fail(sub(k), "must be an array of numbers");
    Vec out;
    out.reserve(j.size());
    for (const auto& v : j) {
      if (!v.is_number()) fail(sub(k), "must contain only numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }

  std::vector<Vec> matrix(const char* k) const {
    if (!has(k)) fail(sub(k), "missing required array of rows");
    const json& j = (*node)[k];
    if (!j.is_array() || j.empty()) fail(sub(k), "must be a non-empty array of rows");
    std::vector<Vec> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_array()) fail(sub(k), "rows must be arrays of numbers");
      Vec row;
      for (const auto& v : j[i]) {
        if (!v.is_number()) fail(sub(k), "rows must contain only numbers");
        row.push_back(v.get<double>());
      }
      out.push_back(std::move(row));
    }
    return out;
  }
};

CompoundPoisson parse_jump_dist(const Cur& c, json& out) {
  CompoundPoisson cp;
  const std::string dist = c.str("dist");
  out["dist"] = dist;
  if (dist == "normal") {
    c.allow({"dist", "mean", "stddev"});
    const double mean = c.num("mean", 0.0);
    const double sd = c.num("stddev", 1.0);
    if (!(sd > 0.0)) fail(c.sub("stddev"), "must be positive");
    out["mean"] = mean;
    out["stddev"] = sd;
    const double norm = 1.0 / (sd * std::sqrt(2.0 * std::numbers::pi));
    cp.jump_density = [mean, sd, norm](double y) {
      const double u = (y - mean) / sd;
      return norm * std::exp(-0.5 * u * u);
    };
    cp.draw = [mean, sd](PathRng& r) { return mean + sd * r.normal(); };
    cp.symmetric = mean == 0.0;
  } else if (dist == "uniform") {
    c.allow({"dist", "lo", "hi"});
    const double lo = c.num("lo");
    const double hi = c.num("hi");
    if (!(hi > lo)) fail(c.sub("hi"), "must exceed lo");
    out["lo"] = lo;
    out["hi"] = hi;
    const double dens = 1.0 / (hi - lo);
    cp.jump_density = [lo, hi, dens](double y) {
      return (y >= lo && y <= hi) ? dens : 0.0;
    };
    cp.draw = [lo, hi](PathRng& r) { return lo + (hi - lo) * r.u01(); };
    cp.symmetric = lo == -hi;
    for (double b : {std::abs(lo), std::abs(hi)})
      if (b > 0.0) cp.breakpoints.push_back(b);
    std::sort(cp.breakpoints.begin(), cp.breakpoints.end());
    cp.breakpoints.erase(std::unique(cp.breakpoints.begin(), cp.breakpoints.end()),
                         cp.breakpoints.end());
  } else if (dist == "exponential") {
    c.allow({"dist", "rate", "direction"});
    const double rate = c.num("rate", 1.0);
    if (!(rate > 0.0)) fail(c.sub("rate"), "must be positive");
    const std::string dir = c.str("direction", std::string("up"));
    if (dir != "up" && dir != "down") fail(c.sub("direction"), "must be up or down");
    const double sign = dir == "up" ? 1.0 : -1.0;
    out["rate"] = rate;
    out["direction"] = dir;
    cp.jump_density = [rate, sign](double y) {
      const double u = sign * y;
      return u > 0.0 ? rate * std::exp(-rate * u) : 0.0;
    };
    cp.draw = [rate, sign](PathRng& r) { return sign * r.exponential() / rate; };
    cp.symmetric = false;
  } else if (dist == "two_sided_exponential") {
    c.allow({"dist", "rate"});
    const double rate = c.num("rate", 1.0);
    if (!(rate > 0.0)) fail(c.sub("rate"), "must be positive");
    out["rate"] = rate;
    cp.jump_density = [rate](double y) {
      return 0.5 * rate * std::exp(-rate * std::abs(y));
    };
    cp.draw = [rate](PathRng& r) {
      const double m = r.exponential() / rate;
      return r.u01() < 0.5 ? -m : m;
    };
    cp.symmetric = true;
  } else {
    fail(c.sub("dist"),
         "unknown distribution (use normal, uniform, exponential or "
         "two_sided_exponential)");
  }
  return cp;
}

JumpKernel parse_kernel(const Cur& c, json& out) {
  const std::string type = c.str("type");
  out["type"] = type;
  if (type == "none") {
    c.allow({"type"});
    return JumpKernel{NoJumps{}};
  }
  if (type == "symmetric_stable") {
    c.allow({"type", "alpha", "scale"});
    SymmetricStable st;
    st.alpha = c.num("alpha");
    st.scale = c.num("scale", 1.0);
    out["alpha"] = st.alpha;
    out["scale"] = st.scale;
    return JumpKernel{st};
  }
  if (type == "variance_gamma") {
    c.allow({"type", "c"});
    VarianceGamma vg;
    vg.c = c.num("c");
    out["c"] = vg.c;
    return JumpKernel{vg};
  }
  if (type == "compound_poisson") {
    c.allow({"type", "intensity", "jump"});
    CompoundPoisson cp = parse_jump_dist(c.child("jump"), out["jump"]);
    cp.intensity = c.num("intensity", 1.0);
    if (!(cp.intensity > 0.0)) fail(c.sub("intensity"), "must be positive");
    out["intensity"] = cp.intensity;
    return JumpKernel{cp};
  }
  if (type == "mapped") {
    c.allow({"type", "a", "base"});
    MappedKernel mk;
    mk.a = c.vec("a");
    out["a"] = mk.a;
    auto base = std::make_shared<JumpKernel>(parse_kernel(c.child("base"), out["base"]));
    mk.base = base;
    return JumpKernel{mk};
  }
  if (type == "sum") {
    c.allow({"type", "parts"});
    if (!c.has("parts") || !(*c.node)["parts"].is_array())
      fail(c.sub("parts"), "must be an array of kernels");
    KernelSum ks;
    const json& parts = (*c.node)["parts"];
    out["parts"] = json::array();
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (!parts[i].is_object()) fail(c.sub("parts"), "must contain kernel objects");
      json sub;
      ks.parts.push_back(
          parse_kernel({&parts[i], c.sub("parts") + "[" + std::to_string(i) + "]"},
                       sub));
      out["parts"].push_back(std::move(sub));
    }
    return JumpKernel{ks};
  }
  fail(c.sub("type"), "unknown kernel type");
}

LevyTriplet parse_triplet(const Cur& c, json& out) {
  c.allow({"dim", "drift", "diffusion", "jumps", "cutoff_radius"});
  LevyTriplet t;
  t.dim = int(c.integer("dim", 1));
  if (t.dim < 1) fail(c.sub("dim"), "must be at least 1");
  out["dim"] = t.dim;
  t.drift = c.vec("drift", Vec{});
  out["drift"] = t.drift;
  if (c.has("diffusion")) t.diffusion = c.matrix("diffusion");
  out["diffusion"] = t.diffusion;
  if (c.has("jumps"))
    t.jumps = parse_kernel(c.child("jumps"), out["jumps"]);
  else
    out["jumps"] = json{{"type", "none"}};
  t.cutoff.radius = c.num("cutoff_radius", 1.0);
  out["cutoff_radius"] = t.cutoff.radius;
  return t;
}

std::optional<Box> parse_box(const Cur& parent, const char* key, json& out) {
  if (!parent.has(key)) return std::nullopt;
  Cur c = parent.child(key);
  c.allow({"lo", "hi"});
  Box b;
  b.lo = c.vec("lo");
  b.hi = c.vec("hi");
  out[key] = json{{"lo", b.lo}, {"hi", b.hi}};
  try {
    b.validate();
  } catch (const ValidationError& e) {
    fail(c.path, e.what());
  }
  return b;
}

SymbolModel parse_model(const Cur& c, json& out);

SymbolModel parse_model(const Cur& c, json& out) {
  SymbolModel m;
  const std::string family = c.str("family");
  out["family"] = family;
  const double cutoff = c.num("cutoff_radius", 1.0);
  m.cutoff.radius = cutoff;
  out["cutoff_radius"] = cutoff;
  if (family == "levy") {
    c.allow({"family", "cutoff_radius", "dim", "drift", "diffusion", "jumps"});
    json tj;
    LevyFamily f;
    // triplet fields live on the model object itself; parse a filtered view
    json view;
    for (const char* k : {"dim", "drift", "diffusion", "jumps"})
      if (c.has(k)) view[k] = (*c.node)[k];
    f.triplet = parse_triplet({&view, c.path}, tj);
    f.triplet.cutoff = m.cutoff;
    tj.erase("cutoff_radius");
    for (auto& item : tj.items()) out[item.key()] = item.value();
    m.family = std::move(f);
  } else if (family == "stable_like") {
    c.allow({"family", "cutoff_radius", "alpha_base", "alpha_amplitude", "scale",
             "alpha_min", "alpha_max"});
    StableLikeFamily f;
    const double base = c.num("alpha_base");
    const double amp = c.num("alpha_amplitude", 0.0);
    f.scale = c.num("scale", 1.0);
    f.alpha_min = c.num("alpha_min", base);
    f.alpha_max = c.num("alpha_max", base + amp);
    f.alpha = [base, amp](double x) {
      return base + amp * (1.0 + std::sin(x)) / 2.0;
    };
    out["alpha_base"] = base;
    out["alpha_amplitude"] = amp;
    out["scale"] = f.scale;
    out["alpha_min"] = f.alpha_min;
    out["alpha_max"] = f.alpha_max;
    m.family = std::move(f);
  } else if (family == "sde") {
    c.allow({"family", "cutoff_radius", "driver", "phi"});
    SdeComposedFamily f;
    json dj;
    f.driver = parse_triplet(c.child("driver"), dj);
    out["driver"] = std::move(dj);
    Cur pc = c.child("phi");
    const std::string ptype = pc.str("type");
    out["phi"]["type"] = ptype;
    if (ptype == "scalar_linear") {
      pc.allow({"type"});
      if (f.driver.dim != 1) fail(pc.path, "scalar_linear needs a scalar driver");
      f.state_dim = 1;
      f.state_free = false;
      f.phi = [](std::span<const double> x) { return std::vector<Vec>{{x[0]}}; };
    } else if (ptype == "constant_matrix") {
      pc.allow({"type", "rows"});
      const std::vector<Vec> rows = pc.matrix("rows");
      for (const Vec& r : rows)
        if (int(r.size()) != f.driver.dim)
          fail(pc.sub("rows"), "row width must equal the driver dimension");
      out["phi"]["rows"] = rows;
      f.state_dim = int(rows.size());
      f.state_free = true;
      f.phi = [rows](std::span<const double>) { return rows; };
    } else {
      fail(pc.sub("type"), "unknown phi type (use scalar_linear or constant_matrix)");
    }
    m.family = std::move(f);
  } else if (family == "cogarch") {
    c.allow({"family", "cutoff_radius", "beta", "lambda", "delta", "driver"});
    CogarchParams p;
    p.beta = c.num("beta");
    p.lambda = c.num("lambda");
    p.delta = c.num("delta");
    json dj;
    p.driver = parse_triplet(c.child("driver"), dj);
    out["beta"] = p.beta;
    out["lambda"] = p.lambda;
    out["delta"] = p.delta;
    out["driver"] = std::move(dj);
    try {
      validate_cogarch(p);
    } catch (const ValidationError& e) {
      fail(c.path, e.what());
    }
    CogarchFamily f;
    f.evaluator = std::make_shared<CogarchEvaluator>(std::move(p));
    m.family = std::move(f);
  } else if (family == "sum") {
    c.allow({"family", "cutoff_radius", "components"});
    if (!c.has("components") || !(*c.node)["components"].is_array())
      fail(c.sub("components"), "must be an array of models");
    const json& comps = (*c.node)["components"];
    if (comps.empty()) fail(c.sub("components"), "must not be empty");
    SumIndependentFamily f;
    out["components"] = json::array();
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (!comps[i].is_object())
        fail(c.sub("components"), "must contain model objects");
      json sub;
      SymbolModel part = parse_model(
          {&comps[i], c.sub("components") + "[" + std::to_string(i) + "]"}, sub);
      f.components.push_back(std::make_shared<SymbolModel>(std::move(part)));
      out["components"].push_back(std::move(sub));
    }
    m.family = std::move(f);
  } else if (family == "circle_flow") {
    c.allow({"family", "cutoff_radius"});
    SymbolModel flow = make_circle_flow_model();
    flow.cutoff = m.cutoff;
    m = std::move(flow);
    out["cutoff_radius"] = cutoff;
  } else {
    fail(c.sub("family"),
         "unknown family (use levy, stable_like, sde, cogarch, sum or circle_flow)");
  }
  try {
    validate_model(m);
  } catch (const ValidationError& e) {
    fail(c.path, e.what());
  }
  return m;
}

BallOptimizerConfig parse_optimizer(const Cur& parent, json& out) {
  BallOptimizerConfig cfg;
  json& o = out["optimizer"];
  if (parent.has("optimizer")) {
    Cur c = parent.child("optimizer");
    c.allow({"sphere_directions", "radial_levels", "y_grid", "refine_passes",
             "shrink_factor", "abs_tol", "max_intervals"});
    cfg.sphere_directions = int(c.integer("sphere_directions", long(cfg.sphere_directions)));
    cfg.radial_levels = int(c.integer("radial_levels", long(cfg.radial_levels)));
    cfg.y_grid = int(c.integer("y_grid", long(cfg.y_grid)));
    cfg.refine_passes = int(c.integer("refine_passes", long(cfg.refine_passes)));
    cfg.shrink_factor = c.num("shrink_factor", cfg.shrink_factor);
    cfg.quad.abs_tol = c.num("abs_tol", cfg.quad.abs_tol);
    cfg.quad.max_intervals = int(c.integer("max_intervals", long(cfg.quad.max_intervals)));
    try {
      cfg.validate();
    } catch (const ValidationError& e) {
      fail(c.path, e.what());
    }
  }
  o["sphere_directions"] = cfg.sphere_directions;
  o["radial_levels"] = cfg.radial_levels;
  o["y_grid"] = cfg.y_grid;
  o["refine_passes"] = cfg.refine_passes;
  o["shrink_factor"] = cfg.shrink_factor;
  o["abs_tol"] = cfg.quad.abs_tol;
  o["max_intervals"] = cfg.quad.max_intervals;
  return cfg;
}

}  // namespace

ExperimentConfig parse_experiment(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config root must be an object");
  Cur root{&doc, ""};
  root.allow({"model", "seed", "optimizer", "symbol", "indices", "simulate", "bounds",
              "scaling", "empirical_symbol"});

  ExperimentConfig cfg;
  json resolved;
  cfg.model = parse_model(root.child("model"), resolved["model"]);
  cfg.seed = root.u64("seed", 0);
  resolved["seed"] = cfg.seed;
  cfg.optimizer = parse_optimizer(root, resolved);

  if (root.has("symbol")) {
    Cur c = root.child("symbol");
    c.allow({"points", "xis"});
    SymbolBlock b;
    b.points = c.matrix("points");
    b.xis = c.matrix("xis");
    resolved["symbol"] = json{{"points", b.points}, {"xis", b.xis}};
    cfg.symbol = std::move(b);
  }
  if (root.has("indices")) {
    Cur c = root.child("indices");
    c.allow({"side", "x", "k_max", "window", "y_domain"});
    IndicesBlock b;
    b.side = c.str("side", std::string("origin"));
    if (b.side != "origin" && b.side != "infinity")
      fail(c.sub("side"), "must be origin or infinity");
    b.x = c.vec("x", Vec{});
    if (b.side == "infinity" && b.x.empty())
      fail(c.sub("x"), "the infinity side needs an anchor state");
    b.k_max = int(c.integer("k_max", 24));
    if (b.k_max < 1) fail(c.sub("k_max"), "must be at least 1");
    b.window = int(c.integer("window", 6));
    json& r = resolved["indices"];
    r["side"] = b.side;
    r["x"] = b.x;
    r["k_max"] = b.k_max;
    r["window"] = b.window;
    b.y_domain = parse_box(c, "y_domain", r);
    cfg.indices = std::move(b);
  }
  if (root.has("simulate")) {
    Cur c = root.child("simulate");
    c.allow({"x0", "horizon", "n_steps", "paths", "keep_times"});
    SimulateBlock b;
    b.x0 = c.vec("x0");
    b.horizon = c.num("horizon", 1.0);
    b.n_steps = c.integer("n_steps", 256);
    b.paths = c.integer("paths", 100);
    b.keep_times = c.vec("keep_times", Vec{});
    resolved["simulate"] = json{{"x0", b.x0},
                                {"horizon", b.horizon},
                                {"n_steps", b.n_steps},
                                {"paths", b.paths},
                                {"keep_times", b.keep_times}};
    cfg.simulate = std::move(b);
  }
  if (root.has("bounds")) {
    Cur c = root.child("bounds");
    c.allow({"side", "x", "t_grid", "r_grid", "paths", "n_steps"});
    BoundsBlock b;
    b.side = c.str("side", std::string("upper"));
    if (b.side != "upper" && b.side != "lower")
      fail(c.sub("side"), "must be upper or lower");
    b.x = c.vec("x");
    b.t_grid = c.vec("t_grid");
    b.r_grid = c.vec("r_grid");
    b.paths = c.integer("paths", 10000);
    b.n_steps = c.integer("n_steps", 0);
    resolved["bounds"] = json{{"side", b.side},     {"x", b.x},
                              {"t_grid", b.t_grid}, {"r_grid", b.r_grid},
                              {"paths", b.paths},   {"n_steps", b.n_steps}};
    cfg.bounds = std::move(b);
  }
  if (root.has("scaling")) {
    Cur c = root.child("scaling");
    c.allow({"x", "lambda", "direction", "paths", "n_steps", "k_min", "k_max",
             "window", "factor", "index_hint"});
    ScalingBlock b;
    b.x = c.vec("x");
    b.lambda = c.num("lambda");
    b.direction = c.str("direction", std::string("to-zero"));
    if (b.direction != "to-zero" && b.direction != "to-infinity")
      fail(c.sub("direction"), "must be to-zero or to-infinity");
    b.paths = c.integer("paths", 1000);
    b.options.n_steps = c.integer("n_steps", b.options.n_steps);
    if (c.has("k_min")) b.options.k_min = int(c.integer("k_min"));
    if (c.has("k_max")) b.options.k_max = int(c.integer("k_max"));
    b.options.window = int(c.integer("window", long(b.options.window)));
    b.options.factor = c.num("factor", b.options.factor);
    if (c.has("index_hint")) b.options.index_hint = c.num("index_hint");
    json& r = resolved["scaling"];
    r["x"] = b.x;
    r["lambda"] = b.lambda;
    r["direction"] = b.direction;
    r["paths"] = b.paths;
    r["n_steps"] = b.options.n_steps;
    if (b.options.k_min) r["k_min"] = *b.options.k_min;
    if (b.options.k_max) r["k_max"] = *b.options.k_max;
    r["window"] = b.options.window;
    r["factor"] = b.options.factor;
    if (b.options.index_hint) r["index_hint"] = *b.options.index_hint;
    cfg.scaling = std::move(b);
  }
  if (root.has("empirical_symbol")) {
    Cur c = root.child("empirical_symbol");
    c.allow({"x", "xi", "t_seq", "k_radius", "paths", "steps_per_smallest"});
    EmpiricalSymbolBlock b;
    b.x = c.vec("x");
    b.xi = c.vec("xi");
    b.t_seq = c.vec("t_seq");
    b.k_radius = c.num("k_radius", 1.0);
    b.paths = c.integer("paths", 10000);
    b.steps_per_smallest = c.integer("steps_per_smallest", 64);
    resolved["empirical_symbol"] =
        json{{"x", b.x},           {"xi", b.xi},
             {"t_seq", b.t_seq},   {"k_radius", b.k_radius},
             {"paths", b.paths},   {"steps_per_smallest", b.steps_per_smallest}};
    cfg.empirical = std::move(b);
  }

  cfg.resolved = resolved.dump();
  cfg.config_hash = fnv1a_hex(cfg.resolved);
  return cfg;
}

SymbolModel parse_model_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("model is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("model must be an object");
  json resolved;
  return parse_model({&doc, "model"}, resolved);
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace symindex
