#include "lpq/digca.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lpq/binary_io.hpp"
#include "lpq/error.hpp"
#include "lpq/field_io.hpp"
#include "lpq/kernels.hpp"

namespace lpq {

using nn::Activation;

// ---------------------------------------------------------------------------
// Graph

GridGraph build_grid_graph(int n_g, double dx) {
  if (n_g < 3) throw ConfigError("grid graph needs n_g >= 3");
  if (!(dx > 0.0)) throw ConfigError("grid graph needs a positive spacing");
  GridGraph g;
  g.n_g = n_g;
  g.dx = dx;
  const std::size_t n = static_cast<std::size_t>(n_g) * n_g;
  g.coords.resize(n);
  g.row_ptr.assign(1, 0);
  for (int i = 0; i < n_g; ++i)
    for (int j = 0; j < n_g; ++j) {
      g.coords[static_cast<std::size_t>(i) * n_g + j] = {j * dx, i * dx};
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int ii = i + di, jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= n_g || jj >= n_g) continue;
          g.col.push_back(static_cast<std::size_t>(ii) * n_g + jj);
          g.pseudo.push_back(dj);
          g.pseudo.push_back(di);
        }
      g.row_ptr.push_back(g.col.size());
    }
  g.inv_deg.resize(n);
  for (std::size_t u = 0; u < n; ++u) g.inv_deg[u] = 1.0 / g.degree(u);
  g.rev.resize(g.col.size());
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t e = g.row_ptr[u]; e < g.row_ptr[u + 1]; ++e) {
      const std::size_t v = g.col[e];
      for (std::size_t f = g.row_ptr[v]; f < g.row_ptr[v + 1]; ++f)
        if (g.col[f] == u) g.rev[e] = f;
    }
  return g;
}

GridGraph build_grid_graph(const GridSpec& grid) { return build_grid_graph(grid.n_g, grid.spacing()); }

// ---------------------------------------------------------------------------
// MoNet layer

MoNetLayer::MoNetLayer(nn::ParamSet& params, const std::string& prefix, int in, int out, int kernels,
                       Activation act)
    : in_(in), out_(out), q_(kernels), act_(act) {
  if (in < 1 || out < 1 || kernels < 1) throw ConfigError("MoNet layer sizes must be positive");
  mu_ = &params.add(prefix + ".mu", {kernels, 2});
  rho_ = &params.add(prefix + ".rho", {kernels, 2});
  W_ = &params.add(prefix + ".W", {kernels, out, in});
  if (act == Activation::Sin) {
    w_ = &params.add(prefix + ".w", {1});
    w_->value[0] = 1.0;
  }
}

void MoNetLayer::init(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& m : mu_->value) m = u(rng);
  std::fill(rho_->value.begin(), rho_->value.end(), std::log(std::exp(1.0) - 1.0));
  nn::glorot(W_->value, in_, out_, rng);
  if (w_) w_->value[0] = 1.0;
}

std::vector<double> MoNetLayer::kernel_weights(const GridGraph& g) const {
  std::vector<double> s(2 * q_);
  for (int k = 0; k < 2 * q_; ++k) s[k] = softplus(rho_->value[k]);
  std::vector<double> omega(g.edges() * q_);
  for (std::size_t e = 0; e < g.edges(); ++e)
    for (int k = 0; k < q_; ++k) {
      const double d0 = g.pseudo[2 * e] - mu_->value[2 * k];
      const double d1 = g.pseudo[2 * e + 1] - mu_->value[2 * k + 1];
      omega[e * q_ + k] = std::exp(-0.5 * (d0 * d0 / s[2 * k] + d1 * d1 / s[2 * k + 1]));
    }
  return omega;
}

void MoNetLayer::forward(const GridGraph& g, std::span<const double> omega, std::span<const double> h,
                         Cache& c) const {
  const std::size_t n = g.nodes();
  if (h.size() != n * in_) throw ShapeMismatch("MoNet layer input has the wrong channel count");
  c.h.assign(h.begin(), h.end());
  c.msg.resize(n * q_ * out_);
  c.z.resize(n * out_);
  c.y.resize(n * out_);
  kernels::node_transform(W_->value, q_ * out_, in_, h, c.msg);
  kernels::aggregate_messages(g.row_ptr, g.col, g.inv_deg, omega, q_, c.msg, out_, c.z);
  nn::activate_all(act_, w(), c.z, c.y);
}

void MoNetLayer::backward(const GridGraph& g, std::span<const double> omega, const Cache& c,
                          std::span<const double> dy, std::span<double> grad_omega,
                          std::span<double> dh) {
  const std::size_t n = g.nodes();
  std::vector<double> dz(n * out_);
  const double dw = nn::activate_backward(act_, w(), c.z, c.y, dy, dz);
  if (w_) w_->grad[0] += dw;
  kernels::accumulate_edge_weight_grad(g.row_ptr, g.col, g.inv_deg, dz, c.msg, q_, out_, grad_omega);
  std::vector<double> dmsg(n * q_ * out_);
  kernels::aggregate_messages_transpose(g.row_ptr, g.col, g.rev, g.inv_deg, omega, q_, dz, out_, dmsg);
  kernels::node_transform_weight_grad(q_ * out_, in_, dmsg, c.h, W_->grad);
  if (!dh.empty()) kernels::node_transform_input_grad(W_->value, q_ * out_, in_, dmsg, dh);
}

void MoNetLayer::kernel_backward(const GridGraph& g, std::span<const double> omega,
                                 std::span<const double> grad_omega) {
  std::vector<double> s(2 * q_), ds(2 * q_, 0.0), dmu(2 * q_, 0.0);
  for (int k = 0; k < 2 * q_; ++k) s[k] = softplus(rho_->value[k]);
  for (std::size_t e = 0; e < g.edges(); ++e)
    for (int k = 0; k < q_; ++k) {
      const double go = grad_omega[e * q_ + k] * omega[e * q_ + k];
      for (int d = 0; d < 2; ++d) {
        const double diff = g.pseudo[2 * e + d] - mu_->value[2 * k + d];
        dmu[2 * k + d] += go * diff / s[2 * k + d];
        ds[2 * k + d] += go * 0.5 * diff * diff / (s[2 * k + d] * s[2 * k + d]);
      }
    }
  for (int k = 0; k < 2 * q_; ++k) {
    mu_->grad[k] += dmu[k];
    rho_->grad[k] += ds[k] * sigmoid(rho_->value[k]);
  }
}

// ---------------------------------------------------------------------------
// Configuration

void TrainConfig::validate() const {
  if (!(lambda >= 0.0)) throw ConfigError("digca.lambda must be non-negative");
  if (!(lambda_u >= 0.0)) throw ConfigError("digca.lambda_u must be non-negative");
  if (!(lr > 0.0)) throw ConfigError("digca.lr must be positive");
  if (!(lr_min >= 0.0 && lr_min <= lr)) throw ConfigError("digca.lr_min must lie in [0, lr]");
  if (!(mlp_w0 > 0.0)) throw ConfigError("digca.mlp_w0 must be positive");
  if (epochs < 0) throw ConfigError("digca.epochs must be non-negative");
  if (batch < 1) throw ConfigError("digca.batch must be positive");
  if (latent < 1 || kernels < 1 || layers < 1 || hidden < 1 || mlp_hidden < 1 || mlp_layers < 1)
    throw ConfigError("digca layer sizes must be positive");
  if (!(noise >= 0.0)) throw ConfigError("digca.noise must be non-negative");
}

DigcaArch DigcaArch::from(const TrainConfig& cfg, const GridSpec& grid) {
  DigcaArch a;
  a.n_g = grid.n_g;
  a.box = grid.box();
  a.hidden = cfg.hidden;
  a.layers = cfg.layers;
  a.kernels = cfg.kernels;
  a.latent = cfg.latent;
  a.mlp_hidden = cfg.mlp_hidden;
  a.mlp_layers = cfg.mlp_layers;
  return a;
}

void DigcaArch::validate() const {
  if (n_g < 3) throw ConfigError("digca: n_g must be at least 3");
  if (!(box > 0.0)) throw ConfigError("digca: box must be positive");
  if (hidden < 1 || layers < 1 || kernels < 1 || latent < 1 || mlp_hidden < 1 || mlp_layers < 1)
    throw ConfigError("digca layer sizes must be positive");
}

// ---------------------------------------------------------------------------
// Network

struct DiGCANet::Pass {
  std::vector<MoNetLayer::Cache> enc, dec;
  nn::Dense::Cache enc_dense, dec_dense;
  std::vector<nn::Dense::Cache> mlp;
  std::span<const double> features;
};

DiGCANet::DiGCANet(StateKind state, const DigcaArch& arch, double lambda_u, std::uint64_t init_seed)
    : state_(state), arch_(arch), lambda_u_(lambda_u) {
  if (state == StateKind::Lq) throw ConfigError("the liquid state has no network");
  arch.validate();
  if (!(lambda_u >= 0.0)) throw ConfigError("digca.lambda_u must be non-negative");
  graph_ = build_grid_graph(arch.n_g, arch.box / arch.n_g);
  build();
  std::mt19937_64 rng(init_seed);
  for (auto& l : enc_) l.init(rng);
  enc_dense_.init(rng);
  dec_dense_.init(rng);
  for (auto& l : dec_) l.init(rng);
  for (auto& l : mlp_) l.init(rng);
  refresh_kernels();
}

void DiGCANet::build() {
  const int h = arch_.hidden;
  const auto n = static_cast<int>(graph_.nodes());
  for (int l = 0; l < arch_.layers; ++l)
    enc_.emplace_back(params_, "enc." + std::to_string(l), l == 0 ? 2 : h, h, arch_.kernels,
                      Activation::Sin);
  enc_dense_ = nn::Dense(params_, "enc.dense", n * h, arch_.latent, Activation::Identity);
  dec_dense_ = nn::Dense(params_, "dec.dense", arch_.latent, n * h, Activation::Sin);
  for (int l = 0; l < arch_.layers; ++l) {
    const bool last = l + 1 == arch_.layers;
    dec_.emplace_back(params_, "dec." + std::to_string(l), h, last ? 2 : h, arch_.kernels,
                      last ? Activation::Identity : Activation::Sin);
  }
  for (int l = 0; l <= arch_.mlp_layers; ++l) {
    const bool last = l == arch_.mlp_layers;
    mlp_.emplace_back(params_, "mlp." + std::to_string(l), l == 0 ? 2 : arch_.mlp_hidden,
                      last ? arch_.latent : arch_.mlp_hidden,
                      last ? Activation::Identity : Activation::Sin);
  }
}

void DiGCANet::refresh_kernels() {
  enc_omega_.clear();
  dec_omega_.clear();
  for (const auto& l : enc_) enc_omega_.push_back(l.kernel_weights(graph_));
  for (const auto& l : dec_) dec_omega_.push_back(l.kernel_weights(graph_));
}

namespace {

std::pair<double, double> center_scale(double lo, double hi) {
  const double scale = 0.5 * (hi - lo);
  return {0.5 * (hi + lo), scale > 0.0 ? scale : 1.0};
}

}  // namespace

void DiGCANet::fit_normalization(std::span<const TrainingSample> data) {
  if (data.empty()) throw ConfigError("normalization needs at least one sample");
  std::array<double, 2> lo{INFINITY, INFINITY}, hi{-INFINITY, -INFINITY};
  std::array<double, 2> mlo{INFINITY, INFINITY}, mhi{-INFINITY, -INFINITY};
  for (const auto& s : data) {
    for (double v : s.phi) lo[0] = std::min(lo[0], v), hi[0] = std::max(hi[0], v);
    for (double v : s.grad) lo[1] = std::min(lo[1], v), hi[1] = std::max(hi[1], v);
    mlo[0] = std::min(mlo[0], s.mu.eps), mhi[0] = std::max(mhi[0], s.mu.eps);
    mlo[1] = std::min(mlo[1], s.mu.alpha), mhi[1] = std::max(mhi[1], s.mu.alpha);
  }
  for (int c = 0; c < 2; ++c) {
    std::tie(norm_.center[c], norm_.scale[c]) = center_scale(lo[c], hi[c]);
    std::tie(norm_.mu_center[c], norm_.mu_scale[c]) = center_scale(mlo[c], mhi[c]);
  }
}

std::vector<double> DiGCANet::features(std::span<const double> phi, std::span<const double> grad) const {
  const std::size_t n = graph_.nodes();
  if (phi.size() != n || grad.size() != n) throw ShapeMismatch("field size does not match the graph");
  std::vector<double> f(2 * n);
  for (std::size_t u = 0; u < n; ++u) {
    f[2 * u] = (phi[u] - norm_.center[0]) / norm_.scale[0];
    f[2 * u + 1] = lambda_u_ * (grad[u] - norm_.center[1]) / norm_.scale[1];
  }
  return f;
}

Prediction DiGCANet::from_features(std::span<const double> f) const {
  const std::size_t n = graph_.nodes();
  if (f.size() != 2 * n) throw ShapeMismatch("feature size does not match the graph");
  Prediction p;
  p.phi.resize(n);
  for (std::size_t u = 0; u < n; ++u) p.phi[u] = norm_.center[0] + norm_.scale[0] * f[2 * u];
  if (lambda_u_ > 0.0) {
    p.grad.resize(n);
    for (std::size_t u = 0; u < n; ++u)
      p.grad[u] = norm_.center[1] + norm_.scale[1] * f[2 * u + 1] / lambda_u_;
  }
  return p;
}

std::array<double, 2> DiGCANet::normalize_mu(const ParamPoint& mu) const {
  return {(mu.eps - norm_.mu_center[0]) / norm_.mu_scale[0],
          (mu.alpha - norm_.mu_center[1]) / norm_.mu_scale[1]};
}

std::vector<double> DiGCANet::encode(std::span<const double> features) const {
  if (features.size() != 2 * graph_.nodes()) throw ShapeMismatch("feature size does not match the graph");
  MoNetLayer::Cache c;
  std::vector<double> h(features.begin(), features.end());
  for (std::size_t l = 0; l < enc_.size(); ++l) {
    enc_[l].forward(graph_, enc_omega_[l], h, c);
    h.swap(c.y);
  }
  nn::Dense::Cache d;
  enc_dense_.forward(h, d);
  return d.y;
}

std::vector<double> DiGCANet::decode_features(std::span<const double> latent) const {
  if (static_cast<int>(latent.size()) != arch_.latent) throw ShapeMismatch("latent size");
  nn::Dense::Cache d;
  dec_dense_.forward(latent, d);
  std::vector<double> h = std::move(d.y);
  MoNetLayer::Cache c;
  for (std::size_t l = 0; l < dec_.size(); ++l) {
    dec_[l].forward(graph_, dec_omega_[l], h, c);
    h.swap(c.y);
  }
  return h;
}

Prediction DiGCANet::decode(std::span<const double> latent) const {
  return from_features(decode_features(latent));
}

std::vector<double> DiGCANet::mlp_forward_normalized(std::span<const double> mu_n) const {
  nn::Dense::Cache c;
  std::vector<double> x(mu_n.begin(), mu_n.end());
  for (const auto& l : mlp_) {
    l.forward(x, c);
    x.swap(c.y);
  }
  return x;
}

std::vector<double> DiGCANet::mlp_forward(const ParamPoint& mu) const {
  const auto m = normalize_mu(mu);
  return mlp_forward_normalized(m);
}

Prediction DiGCANet::predict(const ParamPoint& mu) const { return decode(mlp_forward(mu)); }

void DiGCANet::forward_sample(const Item& item, Pass& p) const {
  p.features = item.features;
  p.enc.resize(enc_.size());
  p.dec.resize(dec_.size());
  p.mlp.resize(mlp_.size());
  std::span<const double> h = item.features;
  for (std::size_t l = 0; l < enc_.size(); ++l) {
    enc_[l].forward(graph_, enc_omega_[l], h, p.enc[l]);
    h = p.enc[l].y;
  }
  enc_dense_.forward(h, p.enc_dense);
  dec_dense_.forward(p.enc_dense.y, p.dec_dense);
  h = p.dec_dense.y;
  for (std::size_t l = 0; l < dec_.size(); ++l) {
    dec_[l].forward(graph_, dec_omega_[l], h, p.dec[l]);
    h = p.dec[l].y;
  }
  const auto m = normalize_mu(item.mu);
  std::span<const double> x = m;
  for (std::size_t l = 0; l < mlp_.size(); ++l) {
    mlp_[l].forward(x, p.mlp[l]);
    x = p.mlp[l].y;
  }
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

LossTerms DiGCANet::loss(std::span<const Item> batch, double lambda) const {
  LossTerms t;
  if (batch.empty()) return t;
  Pass p;
  for (const auto& item : batch) {
    forward_sample(item, p);
    t.l_s += sq_dist(p.dec.back().y, item.features);
    t.l_v += sq_dist(p.enc_dense.y, p.mlp.back().y);
  }
  t.l_s /= static_cast<double>(batch.size());
  t.l_v /= static_cast<double>(batch.size());
  t.total = t.l_s + lambda * t.l_v;
  return t;
}

LossTerms DiGCANet::accumulate_gradients(std::span<const Item> batch, double lambda) {
  LossTerms t;
  if (batch.empty()) return t;
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  std::vector<std::vector<double>> g_enc(enc_.size()), g_dec(dec_.size());
  for (std::size_t l = 0; l < enc_.size(); ++l) g_enc[l].assign(enc_omega_[l].size(), 0.0);
  for (std::size_t l = 0; l < dec_.size(); ++l) g_dec[l].assign(dec_omega_[l].size(), 0.0);

  Pass p;
  std::vector<double> dy, dh;
  for (const auto& item : batch) {
    forward_sample(item, p);
    const auto& out = p.dec.back().y;
    const auto& z = p.enc_dense.y;
    const auto& m = p.mlp.back().y;
    t.l_s += sq_dist(out, item.features);
    t.l_v += sq_dist(z, m);

    dy.resize(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) dy[i] = 2.0 * inv_b * (out[i] - item.features[i]);
    for (std::size_t l = dec_.size(); l-- > 0;) {
      dh.resize(p.dec[l].h.size());
      dec_[l].backward(graph_, dec_omega_[l], p.dec[l], dy, g_dec[l], dh);
      dy.swap(dh);
    }
    std::vector<double> dz(z.size());
    dec_dense_.backward(p.dec_dense, dy, dz);

    std::vector<double> dm(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
      const double r = 2.0 * inv_b * lambda * (z[k] - m[k]);
      dz[k] += r;
      dm[k] = -r;
    }
    for (std::size_t l = mlp_.size(); l-- > 0;) {
      std::vector<double> dx(l > 0 ? mlp_[l].in() : 0);
      mlp_[l].backward(p.mlp[l], dm, dx);
      dm.swap(dx);
    }

    dy.resize(p.enc_dense.x.size());
    enc_dense_.backward(p.enc_dense, dz, dy);
    for (std::size_t l = enc_.size(); l-- > 0;) {
      dh.resize(l > 0 ? p.enc[l].h.size() : 0);
      enc_[l].backward(graph_, enc_omega_[l], p.enc[l], dy, g_enc[l], dh);
      dy.swap(dh);
    }
  }
  for (std::size_t l = 0; l < enc_.size(); ++l) enc_[l].kernel_backward(graph_, enc_omega_[l], g_enc[l]);
  for (std::size_t l = 0; l < dec_.size(); ++l) dec_[l].kernel_backward(graph_, dec_omega_[l], g_dec[l]);
  t.l_s *= inv_b;
  t.l_v *= inv_b;
  t.total = t.l_s + lambda * t.l_v;
  return t;
}

// ---------------------------------------------------------------------------
// Training

TrainResult train(DiGCANet& net, std::span<const TrainingSample> data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw ConfigError("training needs at least one sample");
  std::vector<std::vector<double>> feats;
  feats.reserve(data.size());
  for (const auto& s : data) feats.push_back(net.features(s.phi, s.grad));

  const std::size_t n = data.size();
  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch), n);
  nn::Adam adam(net.params(), {cfg.lr});
  std::mt19937_64 rng(derive_seed(cfg.seed, {0x747261696eu, static_cast<std::uint64_t>(index_of(net.state()))}));
  std::vector<std::size_t> order(n);
  std::vector<DiGCANet::Item> items;
  TrainResult result;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.lr_min > 0.0) {
      const double f = 0.5 * (1.0 + std::cos(std::numbers::pi * epoch / cfg.epochs));
      adam.set_lr(cfg.lr_min + (cfg.lr - cfg.lr_min) * f);
    }
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    LossTerms sum;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      items.clear();
      for (std::size_t k = start; k < stop; ++k) items.push_back({data[order[k]].mu, feats[order[k]]});
      net.params().zero_grad();
      const LossTerms t = net.accumulate_gradients(items, cfg.lambda);
      if (!std::isfinite(t.total) || !net.params().grads_finite())
        throw Diverged("DiGCA training diverged at epoch " + std::to_string(epoch));
      adam.step(net.params());
      net.refresh_kernels();
      const double w = static_cast<double>(stop - start);
      sum.total += w * t.total;
      sum.l_s += w * t.l_s;
      sum.l_v += w * t.l_v;
    }
    const double inv = 1.0 / static_cast<double>(n);
    result.history.push_back({sum.total * inv, sum.l_s * inv, sum.l_v * inv});
  }
  return result;
}

std::pair<DiGCANet, TrainResult> train_state_net(StateKind state, const GridSpec& grid,
                                                 std::span<const TrainingSample> data,
                                                 const TrainConfig& cfg) {
  cfg.validate();
  DiGCANet net(state, DigcaArch::from(cfg, grid), cfg.lambda_u,
               derive_seed(cfg.seed, {0x696e6974u, static_cast<std::uint64_t>(index_of(state))}));
  net.set_mlp_frequency(cfg.mlp_w0);
  net.fit_normalization(data);
  TrainResult r = train(net, data, cfg);
  return {std::move(net), std::move(r)};
}

std::vector<TrainingSample> load_training_samples(const std::filesystem::path& dir,
                                                  const DatasetManifest& m, StateKind state,
                                                  std::optional<Split> split, double noise,
                                                  std::uint64_t noise_seed) {
  if (state == StateKind::Lq) throw ConfigError("the liquid state has no stored fields");
  std::vector<TrainingSample> out;
  for (const auto* s : m.select(split)) {
    auto g = load_sample_grids(dir, *s, state);
    if (g.phi.n_g != m.config.grid.n_g || g.grad.n_g != m.config.grid.n_g)
      throw ShapeMismatch("stored grid size does not match the manifest");
    if (noise > 0.0) {
      const auto st = static_cast<std::uint64_t>(index_of(state));
      g.phi = add_noise(g.phi, noise, derive_seed(noise_seed, {s->index, st, 0}));
      g.grad = add_noise(g.grad, noise, derive_seed(noise_seed, {s->index, st, 1}));
    }
    out.push_back({s->mu, std::move(g.phi.values), std::move(g.grad.values)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Energies and metrics

namespace {

std::vector<double> laplacian(std::span<const double> f, int n, double dx) {
  auto at = [&](int i, int j) {
    i = i < 0 ? -i : (i >= n ? 2 * (n - 1) - i : i);
    j = j < 0 ? -j : (j >= n ? 2 * (n - 1) - j : j);
    return f[static_cast<std::size_t>(i) * n + j];
  };
  std::vector<double> out(f.size());
  const double inv = 1.0 / (dx * dx);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out[static_cast<std::size_t>(i) * n + j] =
          (at(i + 1, j) + at(i - 1, j) + at(i, j + 1) + at(i, j - 1) - 4.0 * at(i, j)) * inv;
  return out;
}

}  // namespace

std::vector<double> posthoc_gradient_term(std::span<const double> phi, int n_g, double dx,
                                          const ModelParams& p) {
  if (phi.size() != static_cast<std::size_t>(n_g) * n_g) throw ShapeMismatch("phi size");
  if (n_g < 2) throw ConfigError("posthoc gradient term needs n_g >= 2");
  const auto l1 = laplacian(phi, n_g, dx);
  const auto l2 = laplacian(l1, n_g, dx);
  std::vector<double> g(phi.size());
  for (std::size_t k = 0; k < phi.size(); ++k) g[k] = l2[k] + (1.0 + p.q_sq) * l1[k] + p.q_sq * phi[k];
  return g;
}

EnergyBreakdown grid_energy(std::span<const double> phi, std::span<const double> grad,
                            const ModelParams& p) {
  if (phi.size() != grad.size()) throw ShapeMismatch("phi and G sizes differ");
  if (phi.empty()) return {};
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    s1 += grad[k] * grad[k];
    s2 += bulk_density(phi[k], p);
  }
  const double n = static_cast<double>(phi.size());
  return EnergyBreakdown::from_parts(0.5 * p.c_pen * s1 / n, s2 / n);
}

EnergyBreakdown rom_energy(const DiGCANet& net, const ParamPoint& mu, const ModelParams& p) {
  auto pred = net.predict(mu);
  if (pred.grad.empty()) pred.grad = posthoc_gradient_term(pred.phi, net.arch().n_g, net.graph().dx, p);
  return grid_energy(pred.phi, pred.grad, p);
}

double relative_l2(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) throw ShapeMismatch("relative_l2 sizes differ");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    num += (pred[k] - truth[k]) * (pred[k] - truth[k]);
    den += truth[k] * truth[k];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

// ---------------------------------------------------------------------------
// Model file

namespace {
constexpr std::uint32_t kModelVersion = 1;
}

std::vector<char> encode_model(const DiGCANet& net) {
  bin::Writer w;
  w.magic("DGCA");
  w.u32(kModelVersion);
  w.str(to_string(net.state()));
  const auto& a = net.arch();
  w.u32(static_cast<std::uint32_t>(a.n_g));
  w.f64(a.box);
  for (int v : {a.hidden, a.layers, a.kernels, a.latent, a.mlp_hidden, a.mlp_layers})
    w.u32(static_cast<std::uint32_t>(v));
  w.f64(net.lambda_u());
  const auto& n = net.normalization();
  for (const auto* arr : {&n.center, &n.scale, &n.mu_center, &n.mu_scale}) w.f64s(*arr);
  const auto& ts = net.params().tensors();
  w.u32(static_cast<std::uint32_t>(ts.size()));
  for (const auto& t : ts) {
    w.str(t.name);
    w.u32(static_cast<std::uint32_t>(t.shape.size()));
    for (int d : t.shape) w.u32(static_cast<std::uint32_t>(d));
    w.f64s(t.value);
  }
  return w.bytes();
}

DiGCANet decode_model(std::vector<char> bytes) {
  bin::Reader r(std::move(bytes), "DGCA");
  r.expect_magic("DGCA");
  if (r.u32() != kModelVersion) r.fail("unsupported version");
  const auto state = parse_state(r.str());
  if (!state || *state == StateKind::Lq) r.fail("invalid state tag");
  DigcaArch a;
  a.n_g = static_cast<int>(r.u32());
  a.box = r.f64();
  for (int* v : {&a.hidden, &a.layers, &a.kernels, &a.latent, &a.mlp_hidden, &a.mlp_layers})
    *v = static_cast<int>(r.u32());
  if (a.n_g < 3 || a.n_g > 4096 || a.hidden > 4096 || a.layers > 64 || a.kernels > 256 ||
      a.latent > 1 << 16 || a.mlp_hidden > 1 << 16 || a.mlp_layers > 64)
    r.fail("implausible architecture header");
  const double lambda_u = r.f64();
  Normalization n;
  for (auto* arr : {&n.center, &n.scale, &n.mu_center, &n.mu_scale}) {
    const auto v = r.f64s(2);
    (*arr)[0] = v[0];
    (*arr)[1] = v[1];
  }
  DiGCANet net(*state, a, lambda_u, 0);
  net.set_normalization(n);
  auto& ts = net.params().tensors();
  if (r.u32() != ts.size()) throw ShapeMismatch("DGCA: tensor count does not match the header");
  for (auto& t : ts) {
    if (r.str() != t.name) throw ShapeMismatch("DGCA: unexpected tensor " + t.name);
    const auto rank = r.u32();
    if (rank != t.shape.size()) throw ShapeMismatch("DGCA: rank mismatch for " + t.name);
    for (int d : t.shape)
      if (r.u32() != static_cast<std::uint32_t>(d)) throw ShapeMismatch("DGCA: shape mismatch for " + t.name);
    t.value = r.f64s(t.size());
  }
  r.expect_end();
  net.refresh_kernels();
  return net;
}

void write_model(const std::filesystem::path& path, const DiGCANet& net) {
  bin::write_file(path, encode_model(net));
}

DiGCANet read_model(const std::filesystem::path& path) { return decode_model(bin::read_file(path)); }

}  // namespace lpq
