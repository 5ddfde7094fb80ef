#pragma once

// Data-parallel inner loops of the solver and the graph network. Each kernel
// has an OpenMP version (lpq::kernels) and a plain serial reference
// (lpq::kernels::serial) used by the tests and the benchmark. Sums are formed
// over fixed-size blocks combined in block order, so both versions give
// bitwise-identical results at any thread count.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lpq/model.hpp"

namespace lpq::kernels {

inline constexpr std::size_t kSumBlock = 4096;

struct PointwiseStats {
  double max_imag = 0.0;  // sup |Im phi|
  double max_abs = 0.0;   // sup |Re phi|
  double bulk_sum = 0.0;  // sum of H(Re phi)
};

// Physical samples -> alpha phi^2 - phi^3 in place (imaginary parts dropped).
PointwiseStats apply_bulk_force(std::span<std::complex<double>> phys, const ModelParams& p);

// Statistics only; the buffer is not modified.
PointwiseStats bulk_stats(std::span<const std::complex<double>> phys, const ModelParams& p);

// out[h] = ((1/dt + eps) cur[h] + force[h] * scale) / (1/dt + quartic[h]) for
// active modes and 0 otherwise. Returns sup |out - cur|.
double implicit_update(std::span<const std::complex<double>> cur,
                       std::span<const std::complex<double>> force, double scale,
                       std::span<const double> quartic, std::span<const std::uint8_t> active,
                       double inv_dt, double eps, std::span<std::complex<double>> out);

struct PlaneWave {
  std::complex<double> amplitude;
  double gx = 0.0, gy = 0.0;
};

// field(i, j) = sum_m a_m exp(i (gx_m j dx + gy_m i dx)), row-major with i the
// y index. Writes real and imaginary parts.
void evaluate_plane_waves(std::span<const PlaneWave> waves, int n_g, double dx,
                          std::span<double> re, std::span<double> im);

// Edge aggregation of a graph convolution:
//   out[u][o] = inv_deg[u] * sum_{e in row u} sum_q weight[e][q] * msg[col[e]][q][o]
// with CSR rows (row_ptr, col). msg is node-major [node][q][o].
void aggregate_messages(std::span<const std::size_t> row_ptr, std::span<const std::size_t> col,
                        std::span<const double> inv_deg, std::span<const double> weight, int q,
                        std::span<const double> msg, int out_ch, std::span<double> out);

// Transpose of aggregate_messages with respect to msg:
//   grad_msg[v][k][c] = sum_{e in row v} inv_deg[col[e]] weight[rev[e]][k] grad_out[col[e]][c]
// where rev[e] is the reverse edge of e (the graph must be symmetric).
void aggregate_messages_transpose(std::span<const std::size_t> row_ptr,
                                  std::span<const std::size_t> col, std::span<const std::size_t> rev,
                                  std::span<const double> inv_deg, std::span<const double> weight,
                                  int q, std::span<const double> grad_out, int out_ch,
                                  std::span<double> grad_msg);

// grad_weight[e][k] += inv_deg[u] sum_c grad_out[u][c] msg[col[e]][k][c] for e in row u.
void accumulate_edge_weight_grad(std::span<const std::size_t> row_ptr,
                                 std::span<const std::size_t> col, std::span<const double> inv_deg,
                                 std::span<const double> grad_out, std::span<const double> msg,
                                 int q, int out_ch, std::span<double> grad_weight);

// Per-node linear maps: msg[v][r] = sum_i w[r][i] h[v][i], r < rows.
void node_transform(std::span<const double> w, int rows, int in_ch, std::span<const double> h,
                    std::span<double> msg);

// grad_h[v][i] = sum_r w[r][i] grad_msg[v][r].
void node_transform_input_grad(std::span<const double> w, int rows, int in_ch,
                               std::span<const double> grad_msg, std::span<double> grad_h);

// grad_w[r][i] += sum_v grad_msg[v][r] h[v][i], summed over fixed node blocks.
void node_transform_weight_grad(int rows, int in_ch, std::span<const double> grad_msg,
                                std::span<const double> h, std::span<double> grad_w);

namespace serial {

PointwiseStats apply_bulk_force(std::span<std::complex<double>> phys, const ModelParams& p);
PointwiseStats bulk_stats(std::span<const std::complex<double>> phys, const ModelParams& p);
double implicit_update(std::span<const std::complex<double>> cur,
                       std::span<const std::complex<double>> force, double scale,
                       std::span<const double> quartic, std::span<const std::uint8_t> active,
                       double inv_dt, double eps, std::span<std::complex<double>> out);
void evaluate_plane_waves(std::span<const PlaneWave> waves, int n_g, double dx,
                          std::span<double> re, std::span<double> im);
void aggregate_messages(std::span<const std::size_t> row_ptr, std::span<const std::size_t> col,
                        std::span<const double> inv_deg, std::span<const double> weight, int q,
                        std::span<const double> msg, int out_ch, std::span<double> out);
void aggregate_messages_transpose(std::span<const std::size_t> row_ptr,
                                  std::span<const std::size_t> col, std::span<const std::size_t> rev,
                                  std::span<const double> inv_deg, std::span<const double> weight,
                                  int q, std::span<const double> grad_out, int out_ch,
                                  std::span<double> grad_msg);

void accumulate_edge_weight_grad(std::span<const std::size_t> row_ptr,
                                 std::span<const std::size_t> col, std::span<const double> inv_deg,
                                 std::span<const double> grad_out, std::span<const double> msg,
                                 int q, int out_ch, std::span<double> grad_weight);

void node_transform(std::span<const double> w, int rows, int in_ch, std::span<const double> h,
                    std::span<double> msg);

void node_transform_input_grad(std::span<const double> w, int rows, int in_ch,
                               std::span<const double> grad_msg, std::span<double> grad_h);

void node_transform_weight_grad(int rows, int in_ch, std::span<const double> grad_msg,
                                std::span<const double> h, std::span<double> grad_w);

}  // namespace serial

}  // namespace lpq::kernels
