#pragma once

// Derivative-informed graph convolutional autoencoder. One network per
// ordered state: a MoNet encoder compresses node features [phi, lambda_u G]
// on the grid graph to a latent vector, a mirrored decoder expands it back,
// and a sin-activated MLP maps (eps, alpha) to the latent vector for online
// prediction.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "lpq/model.hpp"
#include "lpq/nn.hpp"
#include "lpq/solver.hpp"
#include "lpq/sweep.hpp"

namespace lpq {

struct GridGraph {
  int n_g = 0;
  double dx = 1.0;
  std::vector<Vec2> coords;            // node u = i * n_g + j at (j dx, i dx)
  std::vector<std::size_t> row_ptr;    // CSR over source node u
  std::vector<std::size_t> col;        // neighbour v of edge e
  std::vector<std::size_t> rev;        // index of the edge (v, u)
  std::vector<double> pseudo;          // e_uv = (x_v - x_u) / dx, 2 per edge
  std::vector<double> inv_deg;

  std::size_t nodes() const { return inv_deg.size(); }
  std::size_t edges() const { return col.size(); }
  int degree(std::size_t u) const { return static_cast<int>(row_ptr[u + 1] - row_ptr[u]); }
};

// 8-neighbour, non-periodic graph on an n_g x n_g grid of spacing dx.
GridGraph build_grid_graph(int n_g, double dx);
GridGraph build_grid_graph(const GridSpec& grid);

class MoNetLayer {
 public:
  MoNetLayer() = default;
  MoNetLayer(nn::ParamSet& params, const std::string& prefix, int in, int out, int kernels,
             nn::Activation act);

  struct Cache {
    std::vector<double> h, msg, z, y;
  };

  int in() const { return in_; }
  int out() const { return out_; }
  int kernels() const { return q_; }
  nn::Activation activation() const { return act_; }
  double w() const { return w_ ? w_->value[0] : 1.0; }

  // omega[e][q] = exp(-1/2 sum_d (e_d - mu_qd)^2 / s_qd), s = softplus(rho).
  std::vector<double> kernel_weights(const GridGraph& g) const;

  void forward(const GridGraph& g, std::span<const double> omega, std::span<const double> h,
               Cache& cache) const;
  // Accumulates W and w gradients and grad_omega; dh may be empty.
  void backward(const GridGraph& g, std::span<const double> omega, const Cache& cache,
                std::span<const double> dy, std::span<double> grad_omega, std::span<double> dh);
  // Chains an accumulated grad_omega into the kernel mean and width gradients.
  void kernel_backward(const GridGraph& g, std::span<const double> omega,
                       std::span<const double> grad_omega);

  void init(std::mt19937_64& rng);

  nn::Tensor& mu() { return *mu_; }
  nn::Tensor& rho() { return *rho_; }
  nn::Tensor& weights() { return *W_; }

 private:
  int in_ = 0, out_ = 0, q_ = 0;
  nn::Activation act_ = nn::Activation::Identity;
  nn::Tensor* mu_ = nullptr;   // q x 2
  nn::Tensor* rho_ = nullptr;  // q x 2
  nn::Tensor* W_ = nullptr;    // q x out x in
  nn::Tensor* w_ = nullptr;    // 1, Sin only
};

inline double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct TrainConfig {
  double lambda = 1.0;
  double lambda_u = 1.0;
  double lr = 1e-3;
  double lr_min = 0.0;  // > 0: cosine decay from lr to lr_min over the epochs
  int epochs = 500;
  int batch = 16;
  int latent = 16;
  int kernels = 4;
  int layers = 3;
  int hidden = 8;
  int mlp_hidden = 50;
  int mlp_layers = 2;
  double mlp_w0 = 1.0;  // initial sin frequency of the first latent-MLP layer
  std::uint64_t seed = 0;
  double noise = 0.0;  // relative noise added to the training node features

  void validate() const;
};

struct DigcaArch {
  int n_g = 32;
  double box = 0.0;
  int hidden = 8;
  int layers = 3;
  int kernels = 4;
  int latent = 16;
  int mlp_hidden = 50;
  int mlp_layers = 2;

  static DigcaArch from(const TrainConfig& cfg, const GridSpec& grid);
  void validate() const;
};

// Per-channel affine maps to [-1, 1]: x_n = (x - center) / scale.
struct Normalization {
  std::array<double, 2> center{0.0, 0.0}, scale{1.0, 1.0};     // phi, G
  std::array<double, 2> mu_center{0.0, 0.0}, mu_scale{1.0, 1.0};  // eps, alpha
};

// Raw training pair: unweighted phi and G grids (n_g^2, row-major).
struct TrainingSample {
  ParamPoint mu;
  std::vector<double> phi;
  std::vector<double> grad;
};

struct LossTerms {
  double total = 0.0;
  double l_s = 0.0;
  double l_v = 0.0;
};

struct Prediction {
  std::vector<double> phi;
  std::vector<double> grad;  // empty when the network carries no G channel (lambda_u = 0)
};

class DiGCANet {
 public:
  DiGCANet(StateKind state, const DigcaArch& arch, double lambda_u, std::uint64_t init_seed);
  // Layers point into the parameter deque, which keeps its elements in place
  // when moved but not when copied.
  DiGCANet(const DiGCANet&) = delete;
  DiGCANet& operator=(const DiGCANet&) = delete;
  DiGCANet(DiGCANet&&) = default;
  DiGCANet& operator=(DiGCANet&&) = default;

  StateKind state() const { return state_; }
  const DigcaArch& arch() const { return arch_; }
  const GridGraph& graph() const { return graph_; }
  double lambda_u() const { return lambda_u_; }
  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }
  const Normalization& normalization() const { return norm_; }
  void set_normalization(const Normalization& n) { norm_ = n; }

  // Normalization constants from raw training data.
  void fit_normalization(std::span<const TrainingSample> data);

  // Network input [n(phi), lambda_u n(G)] (node-major, 2 channels).
  std::vector<double> features(std::span<const double> phi, std::span<const double> grad) const;
  // Inverse of features(); G is empty when lambda_u = 0.
  Prediction from_features(std::span<const double> f) const;
  std::array<double, 2> normalize_mu(const ParamPoint& mu) const;

  std::vector<double> encode(std::span<const double> features) const;
  std::vector<double> decode_features(std::span<const double> latent) const;  // normalized space
  Prediction decode(std::span<const double> latent) const;                    // physical units
  std::vector<double> mlp_forward(const ParamPoint& mu) const;
  void set_mlp_frequency(double w0) { mlp_.front().set_w(w0); }
  std::vector<double> mlp_forward_normalized(std::span<const double> mu_n) const;
  Prediction predict(const ParamPoint& mu) const;

  // Mean loss over the batch. Inputs are network features and mu.
  struct Item {
    ParamPoint mu;
    std::span<const double> features;
  };
  LossTerms loss(std::span<const Item> batch, double lambda) const;
  // Same value as loss(); adds d(loss)/d(params) into the parameter gradients.
  LossTerms accumulate_gradients(std::span<const Item> batch, double lambda);

  // Recomputes the cached kernel weights; call after changing parameters.
  void refresh_kernels();

 private:
  struct Pass;
  void build();
  void forward_sample(const Item& item, Pass& pass) const;

  StateKind state_;
  DigcaArch arch_;
  double lambda_u_;
  GridGraph graph_;
  Normalization norm_;
  nn::ParamSet params_;
  std::vector<MoNetLayer> enc_, dec_;
  nn::Dense enc_dense_, dec_dense_;
  std::vector<nn::Dense> mlp_;
  std::vector<std::vector<double>> enc_omega_, dec_omega_;
};

struct TrainResult {
  std::vector<LossTerms> history;  // per epoch, mean over the training set
};

// Minibatch Adam on the given samples. Deterministic for fixed cfg.seed. A
// minibatch larger than the data is clamped to the data size.
TrainResult train(DiGCANet& net, std::span<const TrainingSample> data, const TrainConfig& cfg);

// Builds a fresh network for `state`, fits normalization and trains.
std::pair<DiGCANet, TrainResult> train_state_net(StateKind state, const GridSpec& grid,
                                                 std::span<const TrainingSample> data,
                                                 const TrainConfig& cfg);

// Loads training pairs for one state from a dataset, optionally with noise.
std::vector<TrainingSample> load_training_samples(const std::filesystem::path& dir,
                                                  const DatasetManifest& m, StateKind state,
                                                  std::optional<Split> split, double noise = 0.0,
                                                  std::uint64_t noise_seed = 0);

// (lap + 1)(lap + q^2) phi by second-order differences with mirrored ghosts.
std::vector<double> posthoc_gradient_term(std::span<const double> phi, int n_g, double dx,
                                          const ModelParams& p);

// e1 = (c/2) mean G^2, e2 = mean H(phi) over grid nodes.
EnergyBreakdown grid_energy(std::span<const double> phi, std::span<const double> grad,
                            const ModelParams& p);
EnergyBreakdown rom_energy(const DiGCANet& net, const ParamPoint& mu, const ModelParams& p);

double relative_l2(std::span<const double> pred, std::span<const double> truth);

// Model container "DGCA".
std::vector<char> encode_model(const DiGCANet& net);
DiGCANet decode_model(std::vector<char> bytes);
void write_model(const std::filesystem::path& path, const DiGCANet& net);
DiGCANet read_model(const std::filesystem::path& path);

}  // namespace lpq
