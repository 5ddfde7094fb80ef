#pragma once

// Full-order phase labeling over the (eps, alpha) domain, balanced dataset
// generation, noise injection and phase-diagram assembly.

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lpq/error.hpp"
#include "lpq/model.hpp"
#include "lpq/solver.hpp"

namespace lpq {

inline constexpr double kTieTolerance = 1e-12;

struct ParamPoint {
  double eps = 0.0;
  double alpha = 0.0;
};

struct Domain {
  double eps_min = -0.01, eps_max = 0.05;
  double alpha_min = 0.0, alpha_max = 1.0;

  bool contains(const ParamPoint& mu) const {
    return mu.eps >= eps_min && mu.eps <= eps_max && mu.alpha >= alpha_min && mu.alpha <= alpha_max;
  }
  void validate() const;
};

struct FullOrderConfig {
  int n_h = 8;
  SolverConfig solver;
  double amplitude = 0.3;
  double c_pen = 1.0;
  double q = 2.0 * std::cos(M_PI / 12.0);
  SeedOverrides seeds;

  ModelParams params_at(const ParamPoint& mu) const;
  void validate() const;
};

struct PhaseEvaluation {
  StateKind label = StateKind::Lq;
  std::array<RelaxationResult, kNumOrdered> relaxed;

  std::array<double, kNumOrdered> totals() const;
};

// argmin over {five totals, 0 for Lq}; ties within kTieTolerance go to the
// earlier state in QC, C6, LQ, T6, Lam, Lq order.
StateKind label_from_energies(const std::array<double, kNumOrdered>& totals);

// Relaxes all five ordered initializers at mu. `order` permutes the
// evaluation sequence only; the result does not depend on it.
PhaseEvaluation full_order_phase(const ParamPoint& mu, const FullOrderConfig& cfg,
                                 const Domain& domain = {},
                                 const std::array<StateKind, kNumOrdered>& order = kOrderedStates);

// Deterministic 64-bit seed from a base seed and a tuple of stream tags.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

// grid + level * std(grid) * z, z i.i.d. standard normal from `seed`.
PhysicalField add_noise(const PhysicalField& grid, double level, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Dataset

enum class Split { Train, Test };

std::string_view to_string(Split s);

struct StateFiles {
  std::string snapshot;  // relative to the dataset directory
  std::string phi;
  std::string grad;
};

struct PhaseSample {
  std::size_t index = 0;
  std::size_t draw = 0;
  ParamPoint mu;
  StateKind label = StateKind::Lq;
  std::array<EnergyBreakdown, kNumOrdered> energies{};
  std::array<int, kNumOrdered> steps{};
  std::array<bool, kNumOrdered> converged{};
  std::array<StateFiles, kNumOrdered> files;
  Split split = Split::Train;

  std::array<double, kNumOrdered> totals() const;
};

struct DatasetConfig {
  int n_per_branch = 200;
  double r_t = 0.75;
  std::uint64_t seed = 0;
  std::vector<StateKind> branches{kAllStates.begin(), kAllStates.end()};
  Domain domain;
  FullOrderConfig full_order;
  GridSpec grid;
  double reconstruct_threshold = 1e-8;
  int batch = 0;  // draws evaluated per parallel round; 0 picks from the thread count

  std::size_t draw_cap() const { return 50u * 6u * static_cast<std::size_t>(n_per_branch); }
  void validate() const;
};

struct DatasetManifest {
  static constexpr int kSchemaVersion = 1;

  DatasetConfig config;
  bool complete = false;
  std::size_t draws = 0;
  std::array<int, kNumStates> counts{};
  std::vector<PhaseSample> samples;

  std::vector<const PhaseSample*> select(std::optional<Split> split,
                                         std::optional<StateKind> label = std::nullopt) const;
};

struct BranchExhausted : Error {
  BranchExhausted(const std::string& msg, DatasetManifest partial)
      : Error(msg), partial(std::move(partial)) {}
  DatasetManifest partial;
};

// Rejection-samples uniform mu until every configured branch holds
// n_per_branch samples, writes snapshots and grids under `dir` and the
// manifest to dir/manifest.json.
DatasetManifest generate_dataset(const DatasetConfig& cfg, const std::filesystem::path& dir);

std::string manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const std::string& text);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& m);
DatasetManifest read_manifest(const std::filesystem::path& path);

// Grids of one stored sample and state.
struct SampleGrids {
  PhysicalField phi;
  PhysicalField grad;
};
SampleGrids load_sample_grids(const std::filesystem::path& dir, const PhaseSample& s, StateKind state);

// ---------------------------------------------------------------------------
// Phase diagrams

struct LabelOutcome {
  StateKind label = StateKind::Lq;
  std::optional<std::array<double, kNumOrdered>> energies;
};

using LabelSource = std::function<LabelOutcome(const ParamPoint&)>;

struct DiagramPoint {
  ParamPoint mu;
  std::optional<StateKind> label;  // empty: Unknown
  std::optional<std::array<double, kNumOrdered>> energies;
};

struct DiagramSpec {
  int n_eps = 21;
  int n_alpha = 21;
  Domain domain;
  bool refine = false;

  void validate() const;
};

struct PhaseDiagram {
  DiagramSpec spec;
  std::vector<DiagramPoint> grid;     // alpha-major: index = ia * n_eps + ie
  std::vector<DiagramPoint> refined;  // edge midpoints
  std::vector<ParamPoint> boundary;

  const DiagramPoint& at(int ie, int ia) const { return grid[static_cast<std::size_t>(ia) * spec.n_eps + ie]; }
};

// `source` must be safe to call concurrently.
PhaseDiagram assemble_phase_diagram(const DiagramSpec& spec, const LabelSource& source);

LabelSource full_order_source(const FullOrderConfig& cfg, const Domain& domain);

std::string diagram_csv(const PhaseDiagram& d);
struct CsvRow {
  ParamPoint mu;
  std::optional<StateKind> label;
  std::optional<std::array<double, kNumOrdered>> energies;
};
std::vector<CsvRow> parse_diagram_csv(const std::string& text);

// 8-bit indexed BMP, one `scale` x `scale` block per grid point, alpha upward.
std::vector<char> diagram_bmp(const PhaseDiagram& d, int scale = 8);

struct Rgb {
  std::uint8_t r, g, b;
};
// Palette index 0..5 follows the state order; 6 is Unknown.
const std::array<Rgb, 7>& diagram_palette();

}  // namespace lpq
