#include "lpq/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "lpq/binary_io.hpp"
#include "lpq/error.hpp"

namespace lpq {

FeatureVector assemble_features(const ParamPoint& mu, const std::array<double, kNumOrdered>& energies) {
  FeatureVector f{mu.eps, mu.alpha};
  for (int k = 0; k < kNumOrdered; ++k) f[2 + k] = energies[k];
  for (double v : f)
    if (!std::isfinite(v)) throw NonFiniteError("non-finite classifier feature");
  return f;
}

Probabilities one_hot(StateKind s) {
  Probabilities p{};
  p[index_of(s)] = 1.0;
  return p;
}

StateKind argmax_state(const Probabilities& p) {
  int best = 0;
  for (int k = 1; k < kNumStates; ++k)
    if (p[k] > p[best]) best = k;
  return kAllStates[best];
}

Probabilities softmax(const Probabilities& z) {
  const double m = *std::max_element(z.begin(), z.end());
  Probabilities p{};
  double s = 0.0;
  for (int k = 0; k < kNumStates; ++k) s += p[k] = std::exp(z[k] - m);
  for (auto& v : p) v /= s;
  return p;
}

void ClassifierConfig::validate() const {
  if (epochs < 0) throw ConfigError("classifier.epochs must be non-negative");
  if (!(lr > 0.0)) throw ConfigError("classifier.lr must be positive");
  if (batch < 1) throw ConfigError("classifier.batch must be positive");
}

ClassifierNet::ClassifierNet(std::uint64_t init_seed) {
  for (std::size_t l = 0; l + 1 < kWidths.size(); ++l) {
    const bool last = l + 2 == kWidths.size();
    layers_.emplace_back(params_, "cls." + std::to_string(l), kWidths[l], kWidths[l + 1],
                         last ? nn::Activation::Identity : nn::Activation::Tanh);
  }
  std::mt19937_64 rng(init_seed);
  for (auto& l : layers_) l.init(rng);
  mean_.fill(0.0);
  std_.fill(1.0);
}

void ClassifierNet::fit_normalization(std::span<const LabeledFeature> data) {
  if (data.empty()) throw ConfigError("classifier normalization needs data");
  const double n = static_cast<double>(data.size());
  for (int j = 0; j < kNumFeatures; ++j) {
    double m = 0.0;
    for (const auto& d : data) m += d.x[j];
    m /= n;
    double v = 0.0;
    for (const auto& d : data) v += (d.x[j] - m) * (d.x[j] - m);
    const double sd = std::sqrt(v / n);
    mean_[j] = m;
    std_[j] = sd > 0.0 ? sd : 1.0;
  }
}

void ClassifierNet::set_normalization(const FeatureVector& mean, const FeatureVector& stddev) {
  for (double s : stddev)
    if (!(s > 0.0)) throw FormatError("classifier scale must be positive");
  mean_ = mean;
  std_ = stddev;
}

Probabilities ClassifierNet::logits(const FeatureVector& x) const {
  std::vector<double> h(kNumFeatures);
  for (int j = 0; j < kNumFeatures; ++j) h[j] = (x[j] - mean_[j]) / std_[j];
  nn::Dense::Cache c;
  for (const auto& l : layers_) {
    l.forward(h, c);
    h.swap(c.y);
  }
  Probabilities z{};
  std::copy(h.begin(), h.end(), z.begin());
  return z;
}

namespace {

double cross_entropy(const Probabilities& z, StateKind label) {
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s) - z[index_of(label)];
}

}  // namespace

double ClassifierNet::loss(std::span<const LabeledFeature> batch) const {
  if (batch.empty()) return 0.0;
  double s = 0.0;
  for (const auto& d : batch) s += cross_entropy(logits(d.x), d.label);
  return s / static_cast<double>(batch.size());
}

double ClassifierNet::accumulate_gradients(std::span<const LabeledFeature> batch) {
  if (batch.empty()) return 0.0;
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  std::vector<nn::Dense::Cache> caches(layers_.size());
  double total = 0.0;
  for (const auto& d : batch) {
    std::vector<double> h(kNumFeatures);
    for (int j = 0; j < kNumFeatures; ++j) h[j] = (d.x[j] - mean_[j]) / std_[j];
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      layers_[l].forward(h, caches[l]);
      h = caches[l].y;
    }
    Probabilities z{};
    std::copy(h.begin(), h.end(), z.begin());
    total += cross_entropy(z, d.label);
    const auto p = softmax(z);
    std::vector<double> dy(kNumStates);
    for (int k = 0; k < kNumStates; ++k) dy[k] = inv_b * (p[k] - (k == index_of(d.label) ? 1.0 : 0.0));
    for (std::size_t l = layers_.size(); l-- > 0;) {
      std::vector<double> dx(l > 0 ? layers_[l].in() : 0);
      layers_[l].backward(caches[l], dy, dx);
      dy.swap(dx);
    }
  }
  return total * inv_b;
}

Classification classify(const ClassifierNet& net, const FeatureVector& x) {
  Classification c;
  c.p = net.probabilities(x);
  c.state = argmax_state(c.p);
  return c;
}

std::pair<ClassifierNet, ClassifierTrainResult> train_classifier(std::span<const LabeledFeature> data,
                                                                 const ClassifierConfig& cfg) {
  cfg.validate();
  std::array<bool, kNumStates> seen{};
  int classes = 0;
  for (const auto& d : data)
    if (!seen[index_of(d.label)]) seen[index_of(d.label)] = true, ++classes;
  if (classes < 2) throw ConfigError("classifier training needs at least two classes");

  ClassifierNet net(derive_seed(cfg.seed, {0x636c73u}));
  net.fit_normalization(data);
  nn::Adam adam(net.params(), {cfg.lr});
  std::mt19937_64 rng(derive_seed(cfg.seed, {0x636c73u, 1}));
  const std::size_t n = data.size();
  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch), n);
  std::vector<std::size_t> order(n);
  std::vector<LabeledFeature> items;
  ClassifierTrainResult result;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    double sum = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      items.clear();
      for (std::size_t k = start; k < stop; ++k) items.push_back(data[order[k]]);
      net.params().zero_grad();
      const double l = net.accumulate_gradients(items);
      if (!std::isfinite(l) || !net.params().grads_finite())
        throw Diverged("classifier training diverged at epoch " + std::to_string(epoch));
      adam.step(net.params());
      sum += l * static_cast<double>(stop - start);
    }
    result.history.push_back(sum / static_cast<double>(n));
  }
  return {std::move(net), std::move(result)};
}

AccuracyReport evaluate_accuracy(const std::function<StateKind(const FeatureVector&)>& predict,
                                 std::span<const LabeledFeature> data) {
  AccuracyReport r;
  r.count = data.size();
  std::size_t hits = 0;
  for (const auto& d : data) {
    const StateKind s = predict(d.x);
    ++r.confusion[index_of(d.label)][index_of(s)];
    hits += s == d.label;
  }
  r.accuracy = data.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(data.size());
  return r;
}

AccuracyReport evaluate_accuracy(const ClassifierNet& net, std::span<const LabeledFeature> data) {
  return evaluate_accuracy([&](const FeatureVector& x) { return classify(net, x).state; }, data);
}

std::vector<LabeledFeature> dataset_features(const DatasetManifest& m, std::optional<Split> split) {
  std::vector<LabeledFeature> out;
  for (const auto* s : m.select(split)) out.push_back({assemble_features(s->mu, s->totals()), s->label});
  return out;
}

namespace {
constexpr std::uint32_t kClassifierVersion = 1;
}

std::vector<char> encode_classifier(const ClassifierNet& net) {
  bin::Writer w;
  w.magic("LPCL");
  w.u32(kClassifierVersion);
  w.u32(static_cast<std::uint32_t>(ClassifierNet::kWidths.size()));
  for (int v : ClassifierNet::kWidths) w.u32(static_cast<std::uint32_t>(v));
  w.f64s(net.mean());
  w.f64s(net.stddev());
  for (const auto& t : net.params().tensors()) w.f64s(t.value);
  return w.bytes();
}

ClassifierNet decode_classifier(std::vector<char> bytes) {
  bin::Reader r(std::move(bytes), "LPCL");
  r.expect_magic("LPCL");
  if (r.u32() != kClassifierVersion) r.fail("unsupported version");
  if (r.u32() != ClassifierNet::kWidths.size()) throw ShapeMismatch("LPCL: unexpected layer count");
  for (int v : ClassifierNet::kWidths)
    if (r.u32() != static_cast<std::uint32_t>(v)) throw ShapeMismatch("LPCL: unexpected layer width");
  ClassifierNet net(0);
  FeatureVector mean{}, sd{};
  auto m = r.f64s(kNumFeatures), s = r.f64s(kNumFeatures);
  std::copy(m.begin(), m.end(), mean.begin());
  std::copy(s.begin(), s.end(), sd.begin());
  net.set_normalization(mean, sd);
  for (auto& t : net.params().tensors()) t.value = r.f64s(t.size());
  r.expect_end();
  return net;
}

void write_classifier(const std::filesystem::path& path, const ClassifierNet& net) {
  bin::write_file(path, encode_classifier(net));
}

ClassifierNet read_classifier(const std::filesystem::path& path) {
  return decode_classifier(bin::read_file(path));
}

}  // namespace lpq
