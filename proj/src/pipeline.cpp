#include "lpq/pipeline.hpp"

#include <cmath>
#include <cstdio>

namespace lpq {

const DiGCANet& RomSet::at(StateKind s) const {
  for (const auto& n : nets)
    if (n.state() == s) return n;
  throw MissingArtifact("no surrogate for state " + std::string(to_string(s)));
}

RomTraining train_rom_set(const std::filesystem::path& dataset_dir, const DatasetManifest& m,
                          const TrainConfig& cfg) {
  cfg.validate();
  const std::uint64_t noise_seed = derive_seed(cfg.seed, {0x6e6f697365});
  RomTraining out;
  for (int k = 0; k < kNumOrdered; ++k) {
    const StateKind s = kOrderedStates[k];
    auto data = load_training_samples(dataset_dir, m, s, Split::Train, cfg.noise, noise_seed);
    if (data.empty()) throw ConfigError("the training split is empty");
    auto [net, res] = train_state_net(s, m.config.grid, data, cfg);
    out.rom.nets.push_back(std::move(net));
    out.results[k] = std::move(res);
  }
  return out;
}

std::filesystem::path rom_model_path(const std::filesystem::path& dir, StateKind s) {
  return dir / ("digca_" + std::string(to_string(s)) + ".dgca");
}

void write_rom_set(const std::filesystem::path& dir, const RomSet& rom) {
  for (const auto& n : rom.nets) write_model(rom_model_path(dir, n.state()), n);
}

RomSet read_rom_set(const std::filesystem::path& dir) {
  RomSet rom;
  for (StateKind s : kOrderedStates) {
    auto net = read_model(rom_model_path(dir, s));
    if (net.state() != s) throw FormatError(rom_model_path(dir, s).string() + ": wrong state");
    rom.nets.push_back(std::move(net));
  }
  return rom;
}

std::array<double, kNumOrdered> rom_energies(const RomSet& rom, const ParamPoint& mu,
                                             const FullOrderConfig& cfg) {
  const auto p = cfg.params_at(mu);
  std::array<double, kNumOrdered> e{};
  for (int k = 0; k < kNumOrdered; ++k) e[k] = rom_energy(rom.at(kOrderedStates[k]), mu, p).total;
  return e;
}

FeatureVector rom_features(const RomSet& rom, const ParamPoint& mu, const FullOrderConfig& cfg) {
  return assemble_features(mu, rom_energies(rom, mu, cfg));
}

std::vector<LabeledFeature> rom_dataset_features(const RomSet& rom, const DatasetManifest& m,
                                                 std::optional<Split> split) {
  std::vector<LabeledFeature> out;
  for (const auto* s : m.select(split))
    out.push_back({rom_features(rom, s->mu, m.config.full_order), s->label});
  return out;
}

LabelSource rom_source(const RomSet& rom, const ClassifierNet& cls, const FullOrderConfig& cfg) {
  return [&rom, &cls, cfg](const ParamPoint& mu) {
    const auto e = rom_energies(rom, mu, cfg);
    return LabelOutcome{classify(cls, assemble_features(mu, e)).state, e};
  };
}

ChannelErrors reconstruction_errors(const DiGCANet& net, std::span<const TrainingSample> data,
                                    const FullOrderConfig& cfg) {
  ChannelErrors r;
  for (const auto& s : data) {
    double ss = 0.0;
    for (double v : s.phi) ss += v * v;
    if (s.phi.empty() || std::sqrt(ss / static_cast<double>(s.phi.size())) < kPatternRms) {
      ++r.skipped;
      continue;
    }
    auto pred = net.predict(s.mu);
    if (pred.grad.empty())
      pred.grad = posthoc_gradient_term(pred.phi, net.arch().n_g, net.graph().dx, cfg.params_at(s.mu));
    r.phi += relative_l2(pred.phi, s.phi);
    r.grad += relative_l2(pred.grad, s.grad);
    ++r.count;
  }
  if (r.count > 0) {
    r.phi /= static_cast<double>(r.count);
    r.grad /= static_cast<double>(r.count);
  }
  return r;
}

}  // namespace lpq
