#pragma once

// Online/offline glue: the five per-state surrogates as one unit, surrogate
// energies and features, and reconstruction error summaries.

#include <filesystem>
#include <optional>
#include <vector>

#include "lpq/classifier.hpp"
#include "lpq/digca.hpp"

namespace lpq {

// One trained network per ordered state, in QC, C6, LQ, T6, Lam order.
struct RomSet {
  std::vector<DiGCANet> nets;

  const DiGCANet& at(StateKind s) const;
};

struct RomTraining {
  RomSet rom;
  std::array<TrainResult, kNumOrdered> results;
};

// Trains all five networks on the training split. Noise (cfg.noise) is added
// to the training fields with per-sample streams derived from cfg.seed.
RomTraining train_rom_set(const std::filesystem::path& dataset_dir, const DatasetManifest& m,
                          const TrainConfig& cfg);

std::filesystem::path rom_model_path(const std::filesystem::path& dir, StateKind s);
void write_rom_set(const std::filesystem::path& dir, const RomSet& rom);
RomSet read_rom_set(const std::filesystem::path& dir);

std::array<double, kNumOrdered> rom_energies(const RomSet& rom, const ParamPoint& mu,
                                             const FullOrderConfig& cfg);
FeatureVector rom_features(const RomSet& rom, const ParamPoint& mu, const FullOrderConfig& cfg);
std::vector<LabeledFeature> rom_dataset_features(const RomSet& rom, const DatasetManifest& m,
                                                 std::optional<Split> split);

LabelSource rom_source(const RomSet& rom, const ClassifierNet& cls, const FullOrderConfig& cfg);

// Samples whose stored phi has RMS below this carry no pattern (decayed
// states); relative errors are not defined for them and they are skipped.
inline constexpr double kPatternRms = 1e-2;

struct ChannelErrors {
  double phi = 0.0;  // mean relative L2 over counted samples
  double grad = 0.0;
  std::size_t count = 0;
  std::size_t skipped = 0;
};

// Surrogate prediction vs stored fields. With lambda_u = 0 the G channel is
// the finite-difference post-hoc estimate from the predicted phi.
ChannelErrors reconstruction_errors(const DiGCANet& net, std::span<const TrainingSample> data,
                                    const FullOrderConfig& cfg);

}  // namespace lpq
