// Serial reference vs OpenMP kernels, plus one full solver step and one
// surrogate training pass.

#include <benchmark/benchmark.h>

#include <random>

#include "lpq/digca.hpp"
#include "lpq/kernels.hpp"
#include "lpq/solver.hpp"

namespace k = lpq::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

std::vector<std::complex<double>> random_field(std::size_t n) {
  const auto re = random_vec(n, 1), im = random_vec(n, 2);
  std::vector<std::complex<double>> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = {0.3 * re[i], 0.3 * im[i]};
  return v;
}

template <bool Parallel>
void BM_bulk_force(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto base = random_field(n);
  const auto p = lpq::ModelParams::standard(0.02, 0.5);
  auto buf = base;
  for (auto _ : st) {
    buf = base;
    auto s = Parallel ? k::apply_bulk_force(buf, p) : k::serial::apply_bulk_force(buf, p);
    benchmark::DoNotOptimize(s);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(n));
}

struct GraphFixture {
  lpq::GridGraph g;
  int q = 4, out = 8, in = 8;
  std::vector<double> weight, msg, w, h, grad_out, result, grad_msg;

  explicit GraphFixture(int n_g) : g(lpq::build_grid_graph(n_g, 1.0)) {
    weight = random_vec(g.edges() * q, 3);
    msg = random_vec(g.nodes() * q * out, 4);
    w = random_vec(static_cast<std::size_t>(q) * out * in, 5);
    h = random_vec(g.nodes() * in, 6);
    grad_out = random_vec(g.nodes() * out, 7);
    result.resize(g.nodes() * out);
    grad_msg.resize(g.nodes() * q * out);
  }
};

template <bool Parallel>
void BM_aggregate(benchmark::State& st) {
  GraphFixture f(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    if (Parallel)
      k::aggregate_messages(f.g.row_ptr, f.g.col, f.g.inv_deg, f.weight, f.q, f.msg, f.out, f.result);
    else
      k::serial::aggregate_messages(f.g.row_ptr, f.g.col, f.g.inv_deg, f.weight, f.q, f.msg, f.out, f.result);
    benchmark::ClobberMemory();
  }
}

template <bool Parallel>
void BM_aggregate_transpose(benchmark::State& st) {
  GraphFixture f(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    if (Parallel)
      k::aggregate_messages_transpose(f.g.row_ptr, f.g.col, f.g.rev, f.g.inv_deg, f.weight, f.q, f.grad_out,
                                      f.out, f.grad_msg);
    else
      k::serial::aggregate_messages_transpose(f.g.row_ptr, f.g.col, f.g.rev, f.g.inv_deg, f.weight, f.q,
                                              f.grad_out, f.out, f.grad_msg);
    benchmark::ClobberMemory();
  }
}

template <bool Parallel>
void BM_node_transform(benchmark::State& st) {
  GraphFixture f(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    if (Parallel)
      k::node_transform(f.w, f.q * f.out, f.in, f.h, f.msg);
    else
      k::serial::node_transform(f.w, f.q * f.out, f.in, f.h, f.msg);
    benchmark::ClobberMemory();
  }
}

template <bool Parallel>
void BM_weight_grad(benchmark::State& st) {
  GraphFixture f(static_cast<int>(st.range(0)));
  std::vector<double> gw(f.w.size());
  for (auto _ : st) {
    if (Parallel)
      k::node_transform_weight_grad(f.q * f.out, f.in, f.msg, f.h, gw);
    else
      k::serial::node_transform_weight_grad(f.q * f.out, f.in, f.msg, f.h, gw);
    benchmark::ClobberMemory();
  }
}

void BM_solver_step(benchmark::State& st) {
  const lpq::LatticeSpec spec(static_cast<int>(st.range(0)));
  const auto p = lpq::ModelParams::standard(5e-6, 0.7071);
  lpq::SolverConfig cfg;
  lpq::Stepper stepper(spec, p, cfg);
  auto a = lpq::initialize(lpq::StateKind::QC, spec);
  auto b = a;
  for (auto _ : st) {
    benchmark::DoNotOptimize(stepper.step(a, b));
    std::swap(a, b);
  }
}

}  // namespace

BENCHMARK(BM_bulk_force<false>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_bulk_force<true>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_aggregate<false>)->Arg(32)->Arg(128);
BENCHMARK(BM_aggregate<true>)->Arg(32)->Arg(128);
BENCHMARK(BM_aggregate_transpose<false>)->Arg(32)->Arg(128);
BENCHMARK(BM_aggregate_transpose<true>)->Arg(32)->Arg(128);
BENCHMARK(BM_node_transform<false>)->Arg(32)->Arg(128);
BENCHMARK(BM_node_transform<true>)->Arg(32)->Arg(128);
BENCHMARK(BM_weight_grad<false>)->Arg(32)->Arg(128);
BENCHMARK(BM_weight_grad<true>)->Arg(32)->Arg(128);
BENCHMARK(BM_solver_step)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
