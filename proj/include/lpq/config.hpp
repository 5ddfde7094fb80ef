#pragma once

// Run configuration: one JSON document with full defaults and strict
// unknown-key rejection. Command-line flags are applied on top.

#include <optional>
#include <string>
#include <vector>

#include "lpq/classifier.hpp"
#include "lpq/digca.hpp"
#include "lpq/json_util.hpp"
#include "lpq/sweep.hpp"

namespace lpq {

struct DiagramConfig {
  int n_eps = 21;
  int n_alpha = 21;
  bool refine = false;
  std::string source = "full";  // "full" or "rom"
  int image_scale = 8;
};

struct BenchConfig {
  int points = 5;
  int n_h = 16;
};

struct SolveConfig {
  std::optional<StateKind> state;
  std::optional<double> eps;
  std::optional<double> alpha;
};

struct RunConfig {
  DatasetConfig dataset;  // also carries model, solver, grid and domain
  std::vector<double> noise_levels{0.01, 0.05, 0.1};
  TrainConfig digca;
  ClassifierConfig classifier;
  DiagramConfig diagram;
  BenchConfig bench;
  SolveConfig solve;
  std::string output = "out";
  int threads = 0;  // 0: OpenMP default

  const FullOrderConfig& full_order() const { return dataset.full_order; }
  const GridSpec& grid() const { return dataset.grid; }
  const Domain& domain() const { return dataset.domain; }

  // One seed for every stochastic stage.
  void set_seed(std::uint64_t seed);
  void validate() const;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);
Json to_json(const RunConfig& c);

}  // namespace lpq
