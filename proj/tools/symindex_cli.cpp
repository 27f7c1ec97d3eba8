#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "symindex/errors.hpp"
#include "symindex/functionals.hpp"
#include "symindex/indices.hpp"
#include "symindex/model_json.hpp"
#include "symindex/parallel.hpp"
#include "symindex/paths.hpp"
#include "symindex/reports_io.hpp"
#include "symindex/selftest.hpp"
#include "symindex/verify.hpp"
#include "symindex/version.hpp"

namespace {

using namespace symindex;

struct Args {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool csv = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig load(const Args& a) {
  if (a.threads > 0) set_max_threads(a.threads);
  std::string text = read_file(a.config);
  if (a.seed) {
    // fold the override into the document so the config hash stays truthful
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    doc["seed"] = *a.seed;
    text = doc.dump();
  }
  return parse_experiment(text);
}

void emit(const Args& a, const std::string& content) {
  if (a.out.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
  } else {
    write_text_file(a.out, content);
  }
}

template <class Block>
const Block& need(const std::optional<Block>& b, const char* name) {
  if (!b) throw ValidationError(std::string("config field '") + name +
                                "': missing; this subcommand needs it");
  return *b;
}

int cmd_symbol(const Args& a) {
  ExperimentConfig cfg = load(a);
  const SymbolBlock& b = need(cfg.symbol, "symbol");
  std::vector<SymbolRow> rows;
  for (const Vec& x : b.points) {
    PreparedSymbol ps = prepare_symbol(cfg.model, x, cfg.optimizer.quad);
    for (const Vec& xi : b.xis) {
      double err = 0.0;
      SymbolValue v = ps.eval(xi, cfg.optimizer.quad, &err);
      rows.push_back({x, xi, v, err});
    }
  }
  emit(a, symbol_table_csv(rows, {cfg.config_hash}));
  return 0;
}

int cmd_indices(const Args& a) {
  ExperimentConfig cfg = load(a);
  const IndicesBlock& b = need(cfg.indices, "indices");
  IndexReport rep;
  if (b.side == "origin") {
    rep = estimate_indices_origin(cfg.model, dyadic_grid_up(b.k_max), b.y_domain,
                                  cfg.optimizer, b.window);
  } else {
    rep = estimate_indices_infinity(cfg.model, b.x, dyadic_grid_down(b.k_max),
                                    cfg.optimizer, b.window);
  }
  emit(a, index_report_json(rep, {cfg.config_hash}));
  return 0;
}

// The deterministic flow has exact paths; everything else walks an Euler grid.
PathEnsemble flow_ensemble(const SimulateBlock& b, std::uint64_t seed) {
  PathGrid grid{b.horizon, b.n_steps};
  grid.validate();
  PathEnsemble ens;
  ens.dim = 2;
  ens.horizon = b.horizon;
  ens.x0 = b.x0;
  ens.rng = RngSpec{seed};
  Vec flat, maxima;
  double run = 0.0;
  for (long k = 0; k <= b.n_steps; ++k) {
    const double t = grid.time_at(k);
    Vec y = deterministic_example(b.x0, t);
    run = std::max(run, std::hypot(y[0] - b.x0[0], y[1] - b.x0[1]));
    if (b.keep_times.empty() || k == 0 ||
        std::any_of(b.keep_times.begin(), b.keep_times.end(), [&](double s) {
          return std::abs(s - t) <= 1e-9 * std::max(1.0, b.horizon);
        })) {
      ens.times.push_back(t);
      flat.insert(flat.end(), y.begin(), y.end());
      maxima.push_back(run);
    }
  }
  ens.path_states = {std::move(flat)};
  ens.path_max = {std::move(maxima)};
  return ens;
}

int cmd_simulate(const Args& a) {
  ExperimentConfig cfg = load(a);
  const SimulateBlock& b = need(cfg.simulate, "simulate");
  const nlohmann::json doc = nlohmann::json::parse(cfg.resolved);
  PathEnsemble ens;
  if (doc["model"]["family"] == "circle_flow") {
    if (b.x0.size() != 2)
      throw ValidationError("config field 'simulate.x0': the flow lives in the plane");
    ens = flow_ensemble(b, cfg.seed);
  } else {
    ModelSimulator sim(cfg.model, b.x0);
    PathGrid grid{b.horizon, b.n_steps};
    ens = sim.ensemble(grid, RngSpec{cfg.seed}, b.paths, b.keep_times);
  }
  emit(a, ensemble_csv(ens, {cfg.config_hash}));
  return 0;
}

int cmd_bounds(const Args& a) {
  ExperimentConfig cfg = load(a);
  const BoundsBlock& b = need(cfg.bounds, "bounds");
  if (b.side == "upper") {
    BoundCheckReport rep =
        check_upper_bound(cfg.model, b.x, b.t_grid, b.r_grid, RngSpec{cfg.seed},
                          b.paths, cfg.optimizer, b.n_steps);
    emit(a, a.csv ? bound_report_csv(rep, {cfg.config_hash})
                  : bound_report_json(rep, {cfg.config_hash}));
  } else {
    const int d = model_dim(cfg.model);
    Box xd{Vec(b.x.begin(), b.x.end()), Vec(b.x.begin(), b.x.end())};
    Box xid{Vec(d, -10.0), Vec(d, 10.0)};
    SectorEstimate sector = estimate_sector_constant(cfg.model, xd, xid, cfg.optimizer);
    LowerBoundReport rep =
        check_lower_bound(cfg.model, b.x, b.t_grid, b.r_grid, sector,
                          RngSpec{cfg.seed}, b.paths, cfg.optimizer, b.n_steps);
    emit(a, a.csv ? lower_report_csv(rep, {cfg.config_hash})
                  : lower_report_json(rep, {cfg.config_hash}));
  }
  return 0;
}

int cmd_scaling(const Args& a) {
  ExperimentConfig cfg = load(a);
  const ScalingBlock& b = need(cfg.scaling, "scaling");
  const ScalingDirection dir = b.direction == "to-zero" ? ScalingDirection::ToZero
                                                        : ScalingDirection::ToInfinity;
  ScalingReport rep = scaling_diagnostic(cfg.model, b.x, b.lambda, dir,
                                         RngSpec{cfg.seed}, b.paths, b.options);
  emit(a, a.csv ? scaling_report_csv(rep, {cfg.config_hash})
                : scaling_report_json(rep, {cfg.config_hash}));
  return 0;
}

int cmd_empirical(const Args& a) {
  ExperimentConfig cfg = load(a);
  const EmpiricalSymbolBlock& b = need(cfg.empirical, "empirical_symbol");
  std::vector<SymbolEstimate> rows =
      empirical_symbol(cfg.model, b.x, b.xi, b.t_seq, b.k_radius, RngSpec{cfg.seed},
                       b.paths, b.steps_per_smallest);
  emit(a, empirical_symbol_csv(rows, {cfg.config_hash}));
  return 0;
}

int cmd_selftest(const Args& a) {
  if (a.threads > 0) set_max_threads(a.threads);
  return run_selftest(std::cout) == 0 ? 0 : 2;
}

void add_common(CLI::App* sub, Args& a, bool needs_config) {
  auto* c = sub->add_option("--config", a.config, "experiment config (JSON)");
  if (needs_config) c->required();
  sub->add_option("--out", a.out, "output file (default: stdout)");
  sub->add_option("--seed", a.seed, "override the config seed");
  sub->add_option("--threads", a.threads, "worker threads (speed only)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"probabilistic symbols, growth indices and path statistics"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Args a;
  int (*handler)(const Args&) = nullptr;

  auto wire = [&](const char* name, const char* help, int (*fn)(const Args&),
                  bool needs_config = true, bool has_csv = false) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, a, needs_config);
    if (has_csv) sub->add_flag("--csv", a.csv, "emit the flat CSV table");
    sub->callback([&handler, fn] { handler = fn; });
    return sub;
  };

  wire("symbol", "evaluate the symbol on a point/argument table", cmd_symbol);
  wire("indices", "estimate the growth indices", cmd_indices);
  wire("simulate", "sample paths of the model", cmd_simulate);
  wire("verify-bounds", "Monte Carlo check of the maximal inequalities", cmd_bounds,
       true, true);
  wire("verify-scaling", "Monte Carlo scaling-law diagnostic", cmd_scaling, true,
       true);
  wire("empirical-symbol", "estimate the symbol from simulated paths",
       cmd_empirical);
  wire("selftest", "run the built-in consistency battery", cmd_selftest, false);

  CLI11_PARSE(app, argc, argv);

  try {
    return handler(a);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
