#include "lpq/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace lpq::kernels {

namespace {

std::size_t block_count(std::size_t n) { return (n + kSumBlock - 1) / kSumBlock; }

template <bool Apply, typename Span>
PointwiseStats block_pass(Span phys, const ModelParams& p, std::size_t b) {
  PointwiseStats s;
  const std::size_t lo = b * kSumBlock, hi = std::min(phys.size(), lo + kSumBlock);
  for (std::size_t i = lo; i < hi; ++i) {
    const double v = phys[i].real();
    s.max_imag = std::max(s.max_imag, std::abs(phys[i].imag()));
    s.max_abs = std::max(s.max_abs, std::abs(v));
    s.bulk_sum += bulk_density(v, p);
    if constexpr (Apply) phys[i] = bulk_force(v, p);
  }
  return s;
}

PointwiseStats combine(const std::vector<PointwiseStats>& parts) {
  PointwiseStats s;
  for (const auto& b : parts) {
    s.max_imag = std::max(s.max_imag, b.max_imag);
    s.max_abs = std::max(s.max_abs, b.max_abs);
    s.bulk_sum += b.bulk_sum;
  }
  return s;
}

inline std::complex<double> update_mode(std::complex<double> cur, std::complex<double> force,
                                        double scale, double quartic, bool active, double inv_dt,
                                        double eps) {
  if (!active) return 0.0;
  return ((inv_dt + eps) * cur + force * scale) / (inv_dt + quartic);
}

inline void aggregate_row(std::size_t u, std::span<const std::size_t> row_ptr,
                          std::span<const std::size_t> col, std::span<const double> inv_deg,
                          std::span<const double> weight, int q, std::span<const double> msg,
                          int out_ch, std::span<double> out) {
  double* o = out.data() + u * out_ch;
  std::fill(o, o + out_ch, 0.0);
  for (std::size_t e = row_ptr[u]; e < row_ptr[u + 1]; ++e) {
    const double* m = msg.data() + col[e] * q * out_ch;
    const double* w = weight.data() + e * q;
    for (int k = 0; k < q; ++k)
      for (int c = 0; c < out_ch; ++c) o[c] += w[k] * m[k * out_ch + c];
  }
  for (int c = 0; c < out_ch; ++c) o[c] *= inv_deg[u];
}


inline void transpose_row(std::size_t v, std::span<const std::size_t> row_ptr,
                          std::span<const std::size_t> col, std::span<const std::size_t> rev,
                          std::span<const double> inv_deg, std::span<const double> weight, int q,
                          std::span<const double> grad_out, int out_ch, std::span<double> grad_msg) {
  double* g = grad_msg.data() + v * q * out_ch;
  std::fill(g, g + q * out_ch, 0.0);
  for (std::size_t e = row_ptr[v]; e < row_ptr[v + 1]; ++e) {
    const std::size_t u = col[e];
    const double* w = weight.data() + rev[e] * q;
    const double* d = grad_out.data() + u * out_ch;
    for (int k = 0; k < q; ++k) {
      const double s = inv_deg[u] * w[k];
      for (int c = 0; c < out_ch; ++c) g[k * out_ch + c] += s * d[c];
    }
  }
}

inline void edge_grad_row(std::size_t u, std::span<const std::size_t> row_ptr,
                          std::span<const std::size_t> col, std::span<const double> inv_deg,
                          std::span<const double> grad_out, std::span<const double> msg, int q,
                          int out_ch, std::span<double> grad_weight) {
  const double* d = grad_out.data() + u * out_ch;
  for (std::size_t e = row_ptr[u]; e < row_ptr[u + 1]; ++e) {
    const double* m = msg.data() + col[e] * q * out_ch;
    for (int k = 0; k < q; ++k) {
      double acc = 0.0;
      for (int c = 0; c < out_ch; ++c) acc += d[c] * m[k * out_ch + c];
      grad_weight[e * q + k] += inv_deg[u] * acc;
    }
  }
}

inline void transform_node(std::size_t v, std::span<const double> w, int rows, int in_ch,
                           std::span<const double> h, std::span<double> msg) {
  const double* x = h.data() + v * in_ch;
  double* m = msg.data() + v * rows;
  for (int r = 0; r < rows; ++r) {
    const double* wr = w.data() + static_cast<std::size_t>(r) * in_ch;
    double acc = 0.0;
    for (int i = 0; i < in_ch; ++i) acc += wr[i] * x[i];
    m[r] = acc;
  }
}

inline void transform_input_grad_node(std::size_t v, std::span<const double> w, int rows, int in_ch,
                                      std::span<const double> grad_msg, std::span<double> grad_h) {
  const double* g = grad_msg.data() + v * rows;
  double* d = grad_h.data() + v * in_ch;
  std::fill(d, d + in_ch, 0.0);
  for (int r = 0; r < rows; ++r) {
    const double* wr = w.data() + static_cast<std::size_t>(r) * in_ch;
    for (int i = 0; i < in_ch; ++i) d[i] += wr[i] * g[r];
  }
}

inline constexpr std::size_t kNodeBlock = 256;

inline void weight_grad_block(std::size_t b, std::size_t nodes, int rows, int in_ch,
                              std::span<const double> grad_msg, std::span<const double> h,
                              double* part) {
  const std::size_t lo = b * kNodeBlock, hi = std::min(nodes, lo + kNodeBlock);
  std::fill(part, part + static_cast<std::size_t>(rows) * in_ch, 0.0);
  for (std::size_t v = lo; v < hi; ++v) {
    const double* g = grad_msg.data() + v * rows;
    const double* x = h.data() + v * in_ch;
    for (int r = 0; r < rows; ++r)
      for (int i = 0; i < in_ch; ++i) part[static_cast<std::size_t>(r) * in_ch + i] += g[r] * x[i];
  }
}

std::vector<std::complex<double>> column_phases(std::span<const PlaneWave> waves, int n_g,
                                                double dx) {
  std::vector<std::complex<double>> ex(waves.size() * n_g);
  for (std::size_t w = 0; w < waves.size(); ++w)
    for (int j = 0; j < n_g; ++j)
      ex[w * n_g + j] = std::polar(1.0, waves[w].gx * static_cast<double>(j) * dx);
  return ex;
}

}  // namespace

PointwiseStats apply_bulk_force(std::span<std::complex<double>> phys, const ModelParams& p) {
  std::vector<PointwiseStats> parts(block_count(phys.size()));
  const auto nb = static_cast<std::ptrdiff_t>(parts.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) parts[b] = block_pass<true>(phys, p, b);
  return combine(parts);
}

PointwiseStats bulk_stats(std::span<const std::complex<double>> phys, const ModelParams& p) {
  std::vector<PointwiseStats> parts(block_count(phys.size()));
  const auto nb = static_cast<std::ptrdiff_t>(parts.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) parts[b] = block_pass<false>(phys, p, b);
  return combine(parts);
}

double implicit_update(std::span<const std::complex<double>> cur,
                       std::span<const std::complex<double>> force, double scale,
                       std::span<const double> quartic, std::span<const std::uint8_t> active,
                       double inv_dt, double eps, std::span<std::complex<double>> out) {
  double delta = 0.0;
  const auto n = static_cast<std::ptrdiff_t>(cur.size());
#pragma omp parallel for schedule(static) reduction(max : delta)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = update_mode(cur[i], force[i], scale, quartic[i], active[i] != 0, inv_dt, eps);
    delta = std::max(delta, std::abs(out[i] - cur[i]));
  }
  return delta;
}

void evaluate_plane_waves(std::span<const PlaneWave> waves, int n_g, double dx,
                          std::span<double> re, std::span<double> im) {
  const std::vector<std::complex<double>> xphase = column_phases(waves, n_g, dx);
  const auto rows = static_cast<std::ptrdiff_t>(n_g);
#pragma omp parallel
  {
    std::vector<std::complex<double>> row(n_g);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
      std::fill(row.begin(), row.end(), 0.0);
      const double y = static_cast<double>(i) * dx;
      for (std::size_t w = 0; w < waves.size(); ++w) {
        const std::complex<double> a = waves[w].amplitude * std::polar(1.0, waves[w].gy * y);
        const std::complex<double>* ex = xphase.data() + w * n_g;
        for (int j = 0; j < n_g; ++j) row[j] += a * ex[j];
      }
      for (int j = 0; j < n_g; ++j) {
        re[i * n_g + j] = row[j].real();
        im[i * n_g + j] = row[j].imag();
      }
    }
  }
}

void aggregate_messages(std::span<const std::size_t> row_ptr, std::span<const std::size_t> col,
                        std::span<const double> inv_deg, std::span<const double> weight, int q,
                        std::span<const double> msg, int out_ch, std::span<double> out) {
  const auto nodes = static_cast<std::ptrdiff_t>(inv_deg.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t u = 0; u < nodes; ++u)
    aggregate_row(static_cast<std::size_t>(u), row_ptr, col, inv_deg, weight, q, msg, out_ch, out);
}

void aggregate_messages_transpose(std::span<const std::size_t> row_ptr,
                                  std::span<const std::size_t> col, std::span<const std::size_t> rev,
                                  std::span<const double> inv_deg, std::span<const double> weight,
                                  int q, std::span<const double> grad_out, int out_ch,
                                  std::span<double> grad_msg) {
  const auto nodes = static_cast<std::ptrdiff_t>(inv_deg.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t v = 0; v < nodes; ++v)
    transpose_row(static_cast<std::size_t>(v), row_ptr, col, rev, inv_deg, weight, q, grad_out,
                  out_ch, grad_msg);
}

void accumulate_edge_weight_grad(std::span<const std::size_t> row_ptr,
                                 std::span<const std::size_t> col, std::span<const double> inv_deg,
                                 std::span<const double> grad_out, std::span<const double> msg,
                                 int q, int out_ch, std::span<double> grad_weight) {
  const auto nodes = static_cast<std::ptrdiff_t>(inv_deg.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t u = 0; u < nodes; ++u)
    edge_grad_row(static_cast<std::size_t>(u), row_ptr, col, inv_deg, grad_out, msg, q, out_ch,
                  grad_weight);
}

void node_transform(std::span<const double> w, int rows, int in_ch, std::span<const double> h,
                    std::span<double> msg) {
  const auto nodes = static_cast<std::ptrdiff_t>(h.size() / in_ch);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t v = 0; v < nodes; ++v)
    transform_node(static_cast<std::size_t>(v), w, rows, in_ch, h, msg);
}

void node_transform_input_grad(std::span<const double> w, int rows, int in_ch,
                               std::span<const double> grad_msg, std::span<double> grad_h) {
  const auto nodes = static_cast<std::ptrdiff_t>(grad_h.size() / in_ch);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t v = 0; v < nodes; ++v)
    transform_input_grad_node(static_cast<std::size_t>(v), w, rows, in_ch, grad_msg, grad_h);
}

void node_transform_weight_grad(int rows, int in_ch, std::span<const double> grad_msg,
                                std::span<const double> h, std::span<double> grad_w) {
  const std::size_t nodes = h.size() / in_ch;
  const std::size_t blocks = (nodes + kNodeBlock - 1) / kNodeBlock;
  const std::size_t sz = static_cast<std::size_t>(rows) * in_ch;
  std::vector<double> parts(blocks * sz);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b)
    weight_grad_block(static_cast<std::size_t>(b), nodes, rows, in_ch, grad_msg, h, parts.data() + b * sz);
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t k = 0; k < sz; ++k) grad_w[k] += parts[b * sz + k];
}

namespace serial {

PointwiseStats apply_bulk_force(std::span<std::complex<double>> phys, const ModelParams& p) {
  std::vector<PointwiseStats> parts(block_count(phys.size()));
  for (std::size_t b = 0; b < parts.size(); ++b) parts[b] = block_pass<true>(phys, p, b);
  return combine(parts);
}

PointwiseStats bulk_stats(std::span<const std::complex<double>> phys, const ModelParams& p) {
  std::vector<PointwiseStats> parts(block_count(phys.size()));
  for (std::size_t b = 0; b < parts.size(); ++b) parts[b] = block_pass<false>(phys, p, b);
  return combine(parts);
}

double implicit_update(std::span<const std::complex<double>> cur,
                       std::span<const std::complex<double>> force, double scale,
                       std::span<const double> quartic, std::span<const std::uint8_t> active,
                       double inv_dt, double eps, std::span<std::complex<double>> out) {
  double delta = 0.0;
  for (std::size_t i = 0; i < cur.size(); ++i) {
    out[i] = update_mode(cur[i], force[i], scale, quartic[i], active[i] != 0, inv_dt, eps);
    delta = std::max(delta, std::abs(out[i] - cur[i]));
  }
  return delta;
}

void evaluate_plane_waves(std::span<const PlaneWave> waves, int n_g, double dx,
                          std::span<double> re, std::span<double> im) {
  const std::vector<std::complex<double>> xphase = column_phases(waves, n_g, dx);
  for (int i = 0; i < n_g; ++i) {
    const double y = static_cast<double>(i) * dx;
    for (int j = 0; j < n_g; ++j) {
      std::complex<double> acc = 0.0;
      for (std::size_t w = 0; w < waves.size(); ++w)
        acc += (waves[w].amplitude * std::polar(1.0, waves[w].gy * y)) * xphase[w * n_g + j];
      re[i * n_g + j] = acc.real();
      im[i * n_g + j] = acc.imag();
    }
  }
}

void aggregate_messages(std::span<const std::size_t> row_ptr, std::span<const std::size_t> col,
                        std::span<const double> inv_deg, std::span<const double> weight, int q,
                        std::span<const double> msg, int out_ch, std::span<double> out) {
  for (std::size_t u = 0; u < inv_deg.size(); ++u)
    aggregate_row(u, row_ptr, col, inv_deg, weight, q, msg, out_ch, out);
}

void aggregate_messages_transpose(std::span<const std::size_t> row_ptr,
                                  std::span<const std::size_t> col, std::span<const std::size_t> rev,
                                  std::span<const double> inv_deg, std::span<const double> weight,
                                  int q, std::span<const double> grad_out, int out_ch,
                                  std::span<double> grad_msg) {
  for (std::size_t v = 0; v < inv_deg.size(); ++v)
    transpose_row(v, row_ptr, col, rev, inv_deg, weight, q, grad_out, out_ch, grad_msg);
}

void accumulate_edge_weight_grad(std::span<const std::size_t> row_ptr,
                                 std::span<const std::size_t> col, std::span<const double> inv_deg,
                                 std::span<const double> grad_out, std::span<const double> msg,
                                 int q, int out_ch, std::span<double> grad_weight) {
  for (std::size_t u = 0; u < inv_deg.size(); ++u)
    edge_grad_row(u, row_ptr, col, inv_deg, grad_out, msg, q, out_ch, grad_weight);
}

void node_transform(std::span<const double> w, int rows, int in_ch, std::span<const double> h,
                    std::span<double> msg) {
  for (std::size_t v = 0; v < h.size() / in_ch; ++v) transform_node(v, w, rows, in_ch, h, msg);
}

void node_transform_input_grad(std::span<const double> w, int rows, int in_ch,
                               std::span<const double> grad_msg, std::span<double> grad_h) {
  for (std::size_t v = 0; v < grad_h.size() / in_ch; ++v)
    transform_input_grad_node(v, w, rows, in_ch, grad_msg, grad_h);
}

void node_transform_weight_grad(int rows, int in_ch, std::span<const double> grad_msg,
                                std::span<const double> h, std::span<double> grad_w) {
  const std::size_t nodes = h.size() / in_ch;
  const std::size_t sz = static_cast<std::size_t>(rows) * in_ch;
  std::vector<double> part(sz);
  for (std::size_t b = 0; b * kNodeBlock < nodes; ++b) {
    weight_grad_block(b, nodes, rows, in_ch, grad_msg, h, part.data());
    for (std::size_t k = 0; k < sz; ++k) grad_w[k] += part[k];
  }
}

}  // namespace serial

}  // namespace lpq::kernels
