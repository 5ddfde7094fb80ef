#pragma once

// Small reverse-mode building blocks: named parameter tensors, Adam, dense
// layers and pointwise activations. Gradients are accumulated into the
// tensors by the backward passes and cleared explicitly.

#include <cmath>
#include <cstdint>
#include <deque>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace lpq::nn {

enum class Activation : int { Identity = 0, Sin = 1, Tanh = 2 };

struct Tensor {
  std::string name;
  std::vector<int> shape;
  std::vector<double> value;
  std::vector<double> grad;

  std::size_t size() const { return value.size(); }
};

class ParamSet {
 public:
  // References stay valid: storage is a deque.
  Tensor& add(const std::string& name, std::vector<int> shape);
  Tensor* find(const std::string& name);
  const Tensor* find(const std::string& name) const;

  std::deque<Tensor>& tensors() { return tensors_; }
  const std::deque<Tensor>& tensors() const { return tensors_; }
  std::size_t scalar_count() const;
  void zero_grad();
  void scale_grad(double s);
  bool grads_finite() const;
  // FNV-1a over the raw bytes of every value, for change detection.
  std::uint64_t hash() const;

 private:
  std::deque<Tensor> tensors_;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(const ParamSet& params, AdamConfig cfg);
  void step(ParamSet& params);
  long iterations() const { return t_; }
  void set_lr(double lr) { cfg_.lr = lr; }

 private:
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  long t_ = 0;
};

// y = act(z); with Sin, y = sin(w z) for the layer scalar w.
inline double activate(Activation a, double z, double w) {
  switch (a) {
    case Activation::Sin: return std::sin(w * z);
    case Activation::Tanh: return std::tanh(z);
    default: return z;
  }
}

// dy/dz given z (and y for tanh).
inline double activate_dz(Activation a, double z, double y, double w) {
  switch (a) {
    case Activation::Sin: return w * std::cos(w * z);
    case Activation::Tanh: return 1.0 - y * y;
    default: return 1.0;
  }
}

// Applies act in place over z -> y and, for Sin, leaves z for the backward.
void activate_all(Activation a, double w, std::span<const double> z, std::span<double> y);

// Backward through act: dz = dy * act'(z); returns dL/dw (0 unless Sin).
double activate_backward(Activation a, double w, std::span<const double> z,
                         std::span<const double> y, std::span<const double> dy,
                         std::span<double> dz);

class Dense {
 public:
  Dense() = default;
  Dense(ParamSet& params, const std::string& prefix, int in, int out, Activation act);

  struct Cache {
    std::vector<double> x, z, y;
  };

  int in() const { return in_; }
  int out() const { return out_; }
  Activation activation() const { return act_; }
  double w() const { return w_ ? w_->value[0] : 1.0; }
  void set_w(double w) {
    if (w_) w_->value[0] = w;
  }

  void forward(std::span<const double> x, Cache& cache) const;
  // Accumulates parameter gradients; dx may be empty when not needed.
  void backward(const Cache& cache, std::span<const double> dy, std::span<double> dx);

  void init(std::mt19937_64& rng);

 private:
  int in_ = 0, out_ = 0;
  Activation act_ = Activation::Identity;
  Tensor* W_ = nullptr;  // out x in
  Tensor* b_ = nullptr;  // out
  Tensor* w_ = nullptr;  // 1, Sin only
};

// Glorot-uniform fill.
void glorot(std::span<double> v, int fan_in, int fan_out, std::mt19937_64& rng);

}  // namespace lpq::nn
