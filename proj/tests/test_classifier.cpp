#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "gradcheck.hpp"
#include "lpq/classifier.hpp"
#include "lpq/error.hpp"

using namespace lpq;

namespace {

std::vector<LabeledFeature> toy_two_class(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<LabeledFeature> out;
  for (int i = 0; i < n; ++i) {
    LabeledFeature f;
    for (auto& v : f.x) v = nd(rng);
    const double s = f.x[0] + 0.5 * f.x[3] - f.x[6];
    if (std::abs(s) < 0.2) continue;
    f.label = s > 0 ? StateKind::C6 : StateKind::Lam;
    out.push_back(f);
  }
  return out;
}

}  // namespace

TEST_CASE("feature assembly") {
  const auto z = assemble_features({0, 0}, {0, 0, 0, 0, 0});
  for (double v : z) CHECK(v == 0.0);
  const auto f = assemble_features({0.01, 0.5}, {-1, -2, -3, -4, -5});
  CHECK(f[0] == 0.01);
  CHECK(f[1] == 0.5);
  CHECK(f[2] == -1);  // E_QC
  CHECK(f[6] == -5);  // E_Lam
  CHECK_THROWS_AS(assemble_features({0, 0}, {0, NAN, 0, 0, 0}), NonFiniteError);
}

TEST_CASE("one-hot encoding and argmax") {
  CHECK(one_hot(StateKind::QC) == Probabilities{1, 0, 0, 0, 0, 0});
  CHECK(one_hot(StateKind::Lq) == Probabilities{0, 0, 0, 0, 0, 1});
  for (auto s : kAllStates) {
    const auto h = one_hot(s);
    CHECK(std::accumulate(h.begin(), h.end(), 0.0) == 1.0);
    CHECK(argmax_state(h) == s);
  }
  CHECK(argmax_state({0.1, 0.6, 0.1, 0.1, 0.05, 0.05}) == StateKind::C6);
  CHECK(argmax_state({1, 1, 1, 1, 1, 1}) == StateKind::QC);
  CHECK(argmax_state({0, 0.3, 0, 0.3, 0, 0}) == StateKind::C6);
}

TEST_CASE("softmax normalization and logit shift invariance") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  ClassifierNet net(3);
  for (int t = 0; t < 1000; ++t) {
    Probabilities z;
    for (auto& v : z) v = u(rng);
    const auto p = softmax(z);
    double s = 0.0;
    for (double v : p) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      s += v;
    }
    CHECK(std::abs(s - 1.0) <= 1e-12);

    const double c = u(rng);
    Probabilities shifted = z;
    for (auto& v : shifted) v += c;
    CHECK(argmax_state(softmax(shifted)) == argmax_state(p));

    FeatureVector x;
    for (auto& v : x) v = u(rng) / 10.0;
    const auto q = net.probabilities(x);
    CHECK(std::abs(std::accumulate(q.begin(), q.end(), 0.0) - 1.0) <= 1e-12);
  }
}

TEST_CASE("cross-entropy gradients match finite differences") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd(0.0, 0.5);
  std::vector<LabeledFeature> batch;
  for (int i = 0; i < 6; ++i) {
    LabeledFeature f;
    for (auto& v : f.x) v = nd(rng);
    f.label = kAllStates[i % kNumStates];
    batch.push_back(f);
  }
  ClassifierNet net(5);
  net.fit_normalization(batch);
  for (auto& t : net.params().tensors())
    for (auto& v : t.value) v += nd(rng);
  net.params().zero_grad();
  const double l = net.accumulate_gradients(batch);
  CHECK(l == doctest::Approx(net.loss(batch)).epsilon(1e-13));
  const auto st = check_gradients(net.params(), [&] { return net.loss(batch); }, 30);
  CHECK_MESSAGE(st.failed == 0, st.failures);
  CHECK(st.checked >= 200);
}

TEST_CASE("separable toy set is learned exactly") {
  const auto data = toy_two_class(200, 9);
  ClassifierConfig cfg;
  cfg.epochs = 300;
  cfg.batch = 32;
  cfg.lr = 3e-3;
  auto [net, hist] = train_classifier(data, cfg);
  CHECK(evaluate_accuracy(net, data).accuracy == 1.0);
  CHECK(hist.history.back() < hist.history.front());

  auto [again, hist2] = train_classifier(data, cfg);
  CHECK(hist2.history == hist.history);
  CHECK(again.params().hash() == net.params().hash());
}

TEST_CASE("training needs two classes") {
  auto data = toy_two_class(20, 2);
  for (auto& d : data) d.label = StateKind::QC;
  CHECK_THROWS_AS(train_classifier(data, {}), ConfigError);
}

TEST_CASE("accuracy and confusion matrix") {
  const auto data = toy_two_class(50, 3);
  const auto perfect = evaluate_accuracy([&](const FeatureVector& x) {
    for (const auto& d : data)
      if (d.x == x) return d.label;
    return StateKind::Lq;
  }, data);
  CHECK(perfect.accuracy == 1.0);
  const auto wrong = evaluate_accuracy([](const FeatureVector&) { return StateKind::Lq; }, data);
  CHECK(wrong.accuracy == 0.0);
  for (auto s : kAllStates) {
    int expected = 0;
    for (const auto& d : data) expected += d.label == s;
    const auto& row = wrong.confusion[index_of(s)];
    CHECK(std::accumulate(row.begin(), row.end(), 0) == expected);
  }
}

TEST_CASE("classifier file round trip") {
  const auto data = toy_two_class(40, 5);
  ClassifierConfig cfg;
  cfg.epochs = 5;
  auto [net, hist] = train_classifier(data, cfg);
  const auto bytes = encode_classifier(net);
  const auto back = decode_classifier(bytes);
  CHECK(encode_classifier(back) == bytes);
  for (const auto& d : data) CHECK(back.probabilities(d.x) == net.probabilities(d.x));
  auto cut = bytes;
  cut.pop_back();
  CHECK_THROWS_AS(decode_classifier(cut), FormatError);
  auto widths = bytes;
  widths[16] = 41;
  CHECK_THROWS_AS(decode_classifier(widths), ShapeMismatch);
}
