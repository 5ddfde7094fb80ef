#pragma once

// Phase classifier: 7 features (eps, alpha, five state energies) through a
// [7, 40, 40, 40, 6] tanh network with softmax output.

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "lpq/model.hpp"
#include "lpq/nn.hpp"
#include "lpq/sweep.hpp"

namespace lpq {

inline constexpr int kNumFeatures = 7;
using FeatureVector = std::array<double, kNumFeatures>;
using Probabilities = std::array<double, kNumStates>;

// [eps, alpha, E_QC, E_C6, E_LQ, E_T6, E_Lam]; throws NonFiniteError.
FeatureVector assemble_features(const ParamPoint& mu, const std::array<double, kNumOrdered>& energies);

Probabilities one_hot(StateKind s);

// First maximal entry in state order.
StateKind argmax_state(const Probabilities& p);

Probabilities softmax(const Probabilities& logits);

struct LabeledFeature {
  FeatureVector x{};
  StateKind label = StateKind::QC;
};

struct ClassifierConfig {
  int epochs = 3000;
  double lr = 1e-3;
  int batch = 32;
  std::uint64_t seed = 0;

  void validate() const;
};

class ClassifierNet {
 public:
  static constexpr std::array<int, 5> kWidths = {kNumFeatures, 40, 40, 40, kNumStates};

  explicit ClassifierNet(std::uint64_t init_seed);
  ClassifierNet(const ClassifierNet&) = delete;
  ClassifierNet& operator=(const ClassifierNet&) = delete;
  ClassifierNet(ClassifierNet&&) = default;
  ClassifierNet& operator=(ClassifierNet&&) = default;

  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }

  // Zero-mean, unit-variance constants over the training features.
  void fit_normalization(std::span<const LabeledFeature> data);
  const FeatureVector& mean() const { return mean_; }
  const FeatureVector& stddev() const { return std_; }
  void set_normalization(const FeatureVector& mean, const FeatureVector& stddev);

  Probabilities logits(const FeatureVector& x) const;
  Probabilities probabilities(const FeatureVector& x) const { return softmax(logits(x)); }

  // Mean cross-entropy.
  double loss(std::span<const LabeledFeature> batch) const;
  // Same value; adds gradients of the mean cross-entropy.
  double accumulate_gradients(std::span<const LabeledFeature> batch);

 private:
  nn::ParamSet params_;
  std::vector<nn::Dense> layers_;
  FeatureVector mean_{}, std_{};
};

struct Classification {
  Probabilities p{};
  StateKind state = StateKind::QC;
};

Classification classify(const ClassifierNet& net, const FeatureVector& x);

struct ClassifierTrainResult {
  std::vector<double> history;  // mean cross-entropy per epoch
};

// Needs at least two distinct labels. Deterministic for fixed cfg.seed.
std::pair<ClassifierNet, ClassifierTrainResult> train_classifier(std::span<const LabeledFeature> data,
                                                                 const ClassifierConfig& cfg);

struct AccuracyReport {
  double accuracy = 0.0;
  std::size_t count = 0;
  std::array<std::array<int, kNumStates>, kNumStates> confusion{};  // [true][predicted]
};

AccuracyReport evaluate_accuracy(const std::function<StateKind(const FeatureVector&)>& predict,
                                 std::span<const LabeledFeature> data);
AccuracyReport evaluate_accuracy(const ClassifierNet& net, std::span<const LabeledFeature> data);

// Full-order features of the stored samples.
std::vector<LabeledFeature> dataset_features(const DatasetManifest& m, std::optional<Split> split);

// Model container "LPCL".
std::vector<char> encode_classifier(const ClassifierNet& net);
ClassifierNet decode_classifier(std::vector<char> bytes);
void write_classifier(const std::filesystem::path& path, const ClassifierNet& net);
ClassifierNet read_classifier(const std::filesystem::path& path);

}  // namespace lpq
