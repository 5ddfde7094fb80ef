#include "lpq/nn.hpp"

#include <cmath>
#include <cstring>

#include "lpq/error.hpp"

namespace lpq::nn {

Tensor& ParamSet::add(const std::string& name, std::vector<int> shape) {
  if (find(name)) throw ShapeMismatch("duplicate parameter " + name);
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  Tensor& t = tensors_.emplace_back();
  t.name = name;
  t.shape = std::move(shape);
  t.value.assign(n, 0.0);
  t.grad.assign(n, 0.0);
  return t;
}

Tensor* ParamSet::find(const std::string& name) {
  for (auto& t : tensors_)
    if (t.name == name) return &t;
  return nullptr;
}

const Tensor* ParamSet::find(const std::string& name) const {
  for (const auto& t : tensors_)
    if (t.name == name) return &t;
  return nullptr;
}

std::size_t ParamSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.size();
  return n;
}

void ParamSet::zero_grad() {
  for (auto& t : tensors_) std::fill(t.grad.begin(), t.grad.end(), 0.0);
}

void ParamSet::scale_grad(double s) {
  for (auto& t : tensors_)
    for (auto& g : t.grad) g *= s;
}

bool ParamSet::grads_finite() const {
  for (const auto& t : tensors_)
    for (double g : t.grad)
      if (!std::isfinite(g)) return false;
  return true;
}

std::uint64_t ParamSet::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& t : tensors_)
    for (double v : t.value) {
      unsigned char b[8];
      std::memcpy(b, &v, 8);
      for (unsigned char c : b) {
        h ^= c;
        h *= 1099511628211ull;
      }
    }
  return h;
}

Adam::Adam(const ParamSet& params, AdamConfig cfg) : cfg_(cfg) {
  for (const auto& t : params.tensors()) {
    m_.emplace_back(t.size(), 0.0);
    v_.emplace_back(t.size(), 0.0);
  }
}

void Adam::step(ParamSet& params) {
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  std::size_t k = 0;
  for (auto& t : params.tensors()) {
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double g = t.grad[i];
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
      t.value[i] -= cfg_.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.eps);
    }
    ++k;
  }
}

void activate_all(Activation a, double w, std::span<const double> z, std::span<double> y) {
  for (std::size_t i = 0; i < z.size(); ++i) y[i] = activate(a, z[i], w);
}

double activate_backward(Activation a, double w, std::span<const double> z,
                         std::span<const double> y, std::span<const double> dy,
                         std::span<double> dz) {
  double dw = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    dz[i] = dy[i] * activate_dz(a, z[i], y[i], w);
    if (a == Activation::Sin) dw += dy[i] * z[i] * std::cos(w * z[i]);
  }
  return dw;
}

void glorot(std::span<double> v, int fan_in, int fan_out, std::mt19937_64& rng) {
  const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-r, r);
  for (auto& x : v) x = u(rng);
}

Dense::Dense(ParamSet& params, const std::string& prefix, int in, int out, Activation act)
    : in_(in), out_(out), act_(act) {
  W_ = &params.add(prefix + ".W", {out, in});
  b_ = &params.add(prefix + ".b", {out});
  if (act == Activation::Sin) {
    w_ = &params.add(prefix + ".w", {1});
    w_->value[0] = 1.0;
  }
}

void Dense::init(std::mt19937_64& rng) {
  glorot(W_->value, in_, out_, rng);
  std::fill(b_->value.begin(), b_->value.end(), 0.0);
  if (w_) w_->value[0] = 1.0;
}

void Dense::forward(std::span<const double> x, Cache& c) const {
  if (static_cast<int>(x.size()) != in_) throw ShapeMismatch("dense layer input size");
  c.x.assign(x.begin(), x.end());
  c.z.resize(out_);
  c.y.resize(out_);
  const double* W = W_->value.data();
  for (int o = 0; o < out_; ++o) {
    const double* row = W + static_cast<std::size_t>(o) * in_;
    double acc = b_->value[o];
    for (int i = 0; i < in_; ++i) acc += row[i] * x[i];
    c.z[o] = acc;
  }
  activate_all(act_, w(), c.z, c.y);
}

void Dense::backward(const Cache& c, std::span<const double> dy, std::span<double> dx) {
  std::vector<double> dz(out_);
  const double dw = activate_backward(act_, w(), c.z, c.y, dy, dz);
  if (w_) w_->grad[0] += dw;
  double* gW = W_->grad.data();
  const double* W = W_->value.data();
  for (int o = 0; o < out_; ++o) {
    b_->grad[o] += dz[o];
    double* grow = gW + static_cast<std::size_t>(o) * in_;
    for (int i = 0; i < in_; ++i) grow[i] += dz[o] * c.x[i];
  }
  if (dx.empty()) return;
  std::fill(dx.begin(), dx.end(), 0.0);
  for (int o = 0; o < out_; ++o) {
    const double* row = W + static_cast<std::size_t>(o) * in_;
    for (int i = 0; i < in_; ++i) dx[i] += row[i] * dz[o];
  }
}

}  // namespace lpq::nn
