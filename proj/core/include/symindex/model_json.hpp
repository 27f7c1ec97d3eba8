#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "symindex/ball_grid.hpp"
#include "symindex/functionals.hpp"
#include "symindex/symbol_model.hpp"
#include "symindex/types.hpp"
#include "symindex/verify.hpp"

namespace symindex {

// One experiment description parsed from JSON: the model plus the per-command
// parameter blocks that are present. Parsing is strict (unknown keys are rejected)
// and every error names the config path of the offending field. The resolved echo
// repeats the configuration with all defaults made explicit; its hash identifies
// the experiment in every output row.

struct SymbolBlock {
  std::vector<Vec> points;  // states
  std::vector<Vec> xis;     // arguments; the output table is the cross product
};

struct IndicesBlock {
  std::string side = "origin";  // "origin" or "infinity"
  Vec x;                        // anchor state, infinity side only
  int k_max = 24;               // dyadic radius grid exponent
  int window = 6;
  std::optional<Box> y_domain;
};

struct SimulateBlock {
  Vec x0;
  double horizon = 1.0;
  long n_steps = 256;
  long paths = 100;
  std::vector<double> keep_times;  // empty keeps every grid node
};

struct BoundsBlock {
  std::string side = "upper";  // "upper" or "lower"
  Vec x;
  std::vector<double> t_grid;
  std::vector<double> r_grid;
  long paths = 10000;
  long n_steps = 0;  // 0 = automatic resolution
};

struct ScalingBlock {
  Vec x;
  double lambda = 1.0;
  std::string direction = "to-zero";  // or "to-infinity"
  long paths = 1000;
  ScalingOptions options;
};

struct EmpiricalSymbolBlock {
  Vec x;
  Vec xi;
  std::vector<double> t_seq;  // decreasing
  double k_radius = 1.0;
  long paths = 10000;
  long steps_per_smallest = 64;
};

struct ExperimentConfig {
  SymbolModel model;
  std::uint64_t seed = 0;
  BallOptimizerConfig optimizer;
  std::optional<SymbolBlock> symbol;
  std::optional<IndicesBlock> indices;
  std::optional<SimulateBlock> simulate;
  std::optional<BoundsBlock> bounds;
  std::optional<ScalingBlock> scaling;
  std::optional<EmpiricalSymbolBlock> empirical;
  std::string resolved;     // canonical JSON with every default explicit
  std::string config_hash;  // FNV-1a 64 of the canonical form, hex
};

ExperimentConfig parse_experiment(const std::string& json_text);

// Model description alone (the value of the "model" key).
SymbolModel parse_model_json(const std::string& json_text);

std::string fnv1a_hex(const std::string& data);

}  // namespace symindex
