// Acceptance suite A1-A11, plus D1 (surrogate vs full-order phase diagram).
// Prints one PASS/FAIL line per criterion and exits non-zero if any fails.
//
//   acceptance [--only A1,A6] [--work DIR] [--cli PATH]
//
// A6-A9 share a desk-scale dataset and trained surrogates kept under --work;
// they are reused when the stored configuration matches.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "gradcheck.hpp"
#include "lpq/binary_io.hpp"
#include "lpq/classifier.hpp"
#include "lpq/config_json.hpp"
#include "lpq/digca.hpp"
#include "lpq/pipeline.hpp"
#include "oracles.hpp"

using namespace lpq;
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Spectral criteria

Outcome a1_ring_zeros() {
  const auto p = ModelParams::standard(0.0, 0.0);
  double worst = 0.0;
  for (const auto* ring : {&unit_ring_indices(), &q_ring_indices()})
    for (const auto& h : *ring) worst = std::max(worst, std::abs(quartic_multiplier(projected_norm_sq(h), p)));
  const double origin = quartic_multiplier(projected_norm_sq({0, 0, 0, 0}), p);
  const bool counts = unit_ring_indices().size() == 12 && q_ring_indices().size() == 12;
  return {counts && worst <= 1e-12 && origin >= 1.0,
          fmt("max |quartic| on 24 ring indices %.3g, at H=0 %.6g", worst, origin)};
}

Outcome a2_convolution() {
  const LatticeSpec spec(4);
  std::mt19937_64 rng(2024);
  Stepper stepper(spec, ModelParams::standard(0.0, 0.0), SolverConfig{});
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto f = oracle::random_hermitian(spec, rng, 0.3, 2);
    const auto [quad, cubic] = stepper.nonlinear_terms(f);
    const auto q2 = oracle::quadratic_convolution(f);
    const auto q3 = oracle::cubic_convolution(f);
    worst = std::max(worst, oracle::max_abs_diff(quad, q2) / oracle::max_abs(q2));
    worst = std::max(worst, oracle::max_abs_diff(cubic, q3) / oracle::max_abs(q3));
  }
  return {worst <= 1e-10, fmt("20 fields at n_h=4, worst relative deviation %.3g", worst)};
}

Outcome a3_parseval() {
  const LatticeSpec spec(8);
  const auto p = ModelParams::standard(5e-6, std::sqrt(0.5));
  const auto tables = build_tables(spec, p);
  std::mt19937_64 rng(7);
  std::vector<SpectralField> fields = {oracle::random_hermitian(spec, rng, 0.05, 1),
                                       oracle::random_hermitian(spec, rng, 0.02, 2)};
  SolverConfig cfg;
  cfg.dt = 0.2;
  cfg.conv_tol = 1e-7;
  fields.push_back(relax(StateKind::QC, p, cfg, spec).field);
  double worst = 0.0;
  for (const auto& f : fields) {
    const auto g = oracle::torus_values(f, &tables.symbol);
    const auto v = oracle::torus_values(f);
    double e1 = 0.0, e2 = 0.0;
    for (double x : g) e1 += x * x;
    for (double x : v) e2 += bulk_density(x, p);
    e1 *= 0.5 * p.c_pen / static_cast<double>(g.size());
    e2 /= static_cast<double>(v.size());
    const auto e = energy(f, p);
    worst = std::max({worst, std::abs(e.e1 - e1) / std::abs(e1), std::abs(e.e2 - e2) / std::abs(e2)});
  }
  return {worst <= 1e-8, fmt("3 fields at n_h=8 (2 random, relaxed QC), worst relative deviation %.3g", worst)};
}

Outcome a4_monotone() {
  const LatticeSpec spec(8);
  SolverConfig cfg;
  cfg.dt = 0.1;
  const std::vector<ParamPoint> probes = {{5e-6, std::sqrt(0.5)}, {0.02, 0.4}, {0.045, 0.95}};
  double worst = -1e300;
  int runs = 0;
  for (const auto& mu : probes)
    for (StateKind s : kOrderedStates) {
      Stepper stepper(spec, ModelParams::standard(mu.eps, mu.alpha), cfg);
      SpectralField cur = initialize(s, spec), next(spec);
      EnergyBreakdown before, after;
      stepper.step(cur, next, &before);
      for (int n = 1; n <= 2000; ++n) {
        std::swap(cur, next);
        stepper.step(cur, next, &after);
        worst = std::max(worst, after.total - before.total);
        before = after;
      }
      ++runs;
    }
  return {runs == 15 && worst <= 1e-10,
          fmt("15 runs x 2000 steps at n_h=8, dt=0.1, largest per-step change %.3g", worst)};
}

Outcome a5_ordering() {
  const LatticeSpec spec(16);
  const auto p = ModelParams::standard(5e-6, std::sqrt(0.5));
  SolverConfig cfg;
  std::array<double, kNumOrdered> e{};
  std::string text;
  for (int k = 0; k < kNumOrdered; ++k) {
    const auto r = relax(kOrderedStates[k], p, cfg, spec);
    e[k] = r.energy.total;
    text += fmt(" %s %.8e%s", to_string(kOrderedStates[k]).data(), e[k], r.converged ? "" : "(unconverged)");
  }
  const bool pass = e[0] < 0.0 && e[0] < *std::min_element(e.begin() + 1, e.end());
  return {pass, "n_h=16 totals:" + text};
}

// ---------------------------------------------------------------------------
// Gradient exactness

Outcome a11_gradients() {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  int checked = 0, failed = 0;
  double worst = 0.0;
  auto tally = [&](const GradCheckStats& s) {
    checked += s.checked;
    failed += s.failed;
    worst = std::max(worst, s.worst);
  };
  auto randomize = [&](nn::ParamSet& ps, double scale) {
    for (auto& t : ps.tensors())
      for (auto& v : t.value) v = scale * nd(rng);
  };

  // Dense layers with each activation.
  for (auto act : {nn::Activation::Identity, nn::Activation::Sin, nn::Activation::Tanh}) {
    nn::ParamSet ps;
    nn::Dense d(ps, "d", 4, 3, act);
    randomize(ps, 0.7);
    std::vector<double> x(4), target(3);
    for (auto& v : x) v = nd(rng);
    for (auto& v : target) v = nd(rng);
    auto loss = [&] {
      nn::Dense::Cache c;
      d.forward(x, c);
      double l = 0.0;
      for (int k = 0; k < 3; ++k) l += 0.5 * (c.y[k] - target[k]) * (c.y[k] - target[k]);
      return l;
    };
    ps.zero_grad();
    nn::Dense::Cache c;
    d.forward(x, c);
    std::vector<double> dy(3), dx(4);
    for (int k = 0; k < 3; ++k) dy[k] = c.y[k] - target[k];
    d.backward(c, dy, dx);
    tally(check_gradients(ps, loss, 20));
  }

  // MoNet layer.
  {
    const auto g = build_grid_graph(4, 0.9);
    nn::ParamSet ps;
    MoNetLayer layer(ps, "m", 3, 2, 2, nn::Activation::Sin);
    randomize(ps, 0.6);
    std::vector<double> h(g.nodes() * 3), target(g.nodes() * 2);
    for (auto& v : h) v = nd(rng);
    for (auto& v : target) v = nd(rng);
    auto loss = [&] {
      MoNetLayer::Cache c;
      layer.forward(g, layer.kernel_weights(g), h, c);
      double l = 0.0;
      for (std::size_t k = 0; k < c.y.size(); ++k) l += 0.5 * (c.y[k] - target[k]) * (c.y[k] - target[k]);
      return l;
    };
    ps.zero_grad();
    const auto omega = layer.kernel_weights(g);
    MoNetLayer::Cache c;
    layer.forward(g, omega, h, c);
    std::vector<double> dy(c.y.size()), dh(h.size()), domega(omega.size(), 0.0);
    for (std::size_t k = 0; k < dy.size(); ++k) dy[k] = c.y[k] - target[k];
    layer.backward(g, omega, c, dy, domega, dh);
    layer.kernel_backward(g, omega, domega);
    tally(check_gradients(ps, loss, 20));
  }

  // Whole surrogate, both loss terms.
  {
    DigcaArch a;
    a.n_g = 5;
    a.box = 4.0;
    a.hidden = 3;
    a.layers = 2;
    a.kernels = 2;
    a.latent = 4;
    a.mlp_hidden = 5;
    a.mlp_layers = 2;
    std::vector<TrainingSample> data;
    for (int s = 0; s < 3; ++s) {
      TrainingSample t{{0.01 * s, 0.3 + 0.2 * s}, std::vector<double>(25), std::vector<double>(25)};
      for (auto& v : t.phi) v = nd(rng);
      for (auto& v : t.grad) v = 0.1 * nd(rng);
      data.push_back(std::move(t));
    }
    DiGCANet net(StateKind::QC, a, 1.0, 3);
    net.fit_normalization(data);
    randomize(net.params(), 0.4);
    net.refresh_kernels();
    std::vector<std::vector<double>> feats;
    for (const auto& s : data) feats.push_back(net.features(s.phi, s.grad));
    std::vector<DiGCANet::Item> items;
    for (std::size_t k = 0; k < data.size(); ++k) items.push_back({data[k].mu, feats[k]});
    net.params().zero_grad();
    net.accumulate_gradients(items, 0.7);
    auto loss = [&] {
      net.refresh_kernels();
      return net.loss(items, 0.7).total;
    };
    // Loss values of order 10 put central-difference roundoff near 1e-11 / h.
    tally(check_gradients(net.params(), loss, 10, 1e-5, 1e-4, 1e-5));
    net.refresh_kernels();
  }

  // Classifier: tanh stack, softmax and cross-entropy.
  {
    ClassifierNet net(5);
    std::vector<LabeledFeature> batch;
    for (int i = 0; i < 12; ++i) {
      LabeledFeature f;
      for (auto& v : f.x) v = nd(rng);
      f.label = kAllStates[i % kNumStates];
      batch.push_back(f);
    }
    net.fit_normalization(batch);
    net.params().zero_grad();
    net.accumulate_gradients(batch);
    tally(check_gradients(net.params(), [&] { return net.loss(batch); }, 30));
  }

  return {failed == 0 && checked > 300,
          fmt("%d entries (dense x3, MoNet, surrogate, classifier), %d failed, worst rel %.3g", checked, failed,
              worst)};
}

// ---------------------------------------------------------------------------
// Desk pipeline shared by A6-A9

DatasetConfig desk_dataset() {
  DatasetConfig d;
  d.n_per_branch = 40;
  d.seed = 1;
  d.branches = {StateKind::QC, StateKind::C6, StateKind::LQ, StateKind::Lam, StateKind::Lq};
  d.full_order.n_h = 8;
  d.full_order.solver.dt = 0.2;
  d.full_order.solver.max_steps = 10000;
  d.full_order.solver.conv_tol = 1e-7;
  d.grid.n_g = 32;
  d.grid.box_multiplier = 4.0;
  return d;
}

TrainConfig desk_training() {
  TrainConfig t;
  t.epochs = 600;
  t.lr = 3e-3;
  t.lr_min = 1e-4;
  t.mlp_w0 = 15.0;
  t.batch = 16;
  t.seed = 1;
  return t;
}

Json training_json(const TrainConfig& t) {
  return {{"lambda", t.lambda},   {"lambda_u", t.lambda_u}, {"lr", t.lr}, {"lr_min", t.lr_min}, {"epochs", t.epochs},
          {"batch", t.batch},     {"latent", t.latent},     {"kernels", t.kernels}, {"layers", t.layers},
          {"hidden", t.hidden},   {"mlp_hidden", t.mlp_hidden}, {"mlp_layers", t.mlp_layers}, {"mlp_w0", t.mlp_w0},
          {"seed", t.seed},       {"noise", t.noise}};
}

class Desk {
 public:
  explicit Desk(fs::path work) : work_(std::move(work)) {}

  const DatasetManifest& manifest() {
    if (!manifest_) {
      const auto cfg = desk_dataset();
      const fs::path dir = work_ / "dataset";
      const fs::path mpath = dir / "manifest.json";
      if (fs::exists(mpath)) {
        auto m = read_manifest(mpath);
        if (m.complete && full_dataset_json(m.config) == full_dataset_json(cfg)) manifest_ = std::move(m);
      }
      if (!manifest_) {
        fs::remove_all(dir);
        const auto t0 = clock_type::now();
        manifest_ = generate_dataset(cfg, dir);
        std::cout << fmt("  [desk dataset: %zu draws, %.0f s]\n", manifest_->draws, seconds_since(t0));
      }
    }
    return *manifest_;
  }

  fs::path dataset_dir() const { return work_ / "dataset"; }

  const RomSet& rom(const std::string& name, const TrainConfig& t) {
    auto it = roms_.find(name);
    if (it != roms_.end()) return it->second;
    const fs::path dir = work_ / name;
    const fs::path stamp = dir / "training.json";
    const std::string want = training_json(t).dump(1);
    const auto& m = manifest();
    if (fs::exists(stamp) && bin::read_text(stamp) == want) {
      try {
        return roms_.emplace(name, read_rom_set(dir)).first->second;
      } catch (const Error&) {
      }
    }
    const auto t0 = clock_type::now();
    auto trained = train_rom_set(dataset_dir(), m, t);
    std::cout << fmt("  [%s: trained 5 surrogates in %.0f s]\n", name.c_str(), seconds_since(t0));
    fs::remove_all(dir);
    write_rom_set(dir, trained.rom);
    bin::write_text(stamp, want);
    return roms_.emplace(name, std::move(trained.rom)).first->second;
  }

  const RomSet& rom_main() { return rom("rom_digca", desk_training()); }
  const RomSet& rom_ablation() {
    auto t = desk_training();
    t.lambda_u = 0.0;
    return rom("rom_ablation", t);
  }
  const RomSet& rom_noisy() {
    auto t = desk_training();
    t.noise = 0.10;
    return rom("rom_noise10", t);
  }

  const ClassifierNet& classifier() {
    if (!cls_) {
      ClassifierConfig c;
      c.seed = 1;
      cls_.emplace(train_classifier(dataset_features(manifest(), Split::Train), c).first);
    }
    return *cls_;
  }

 private:
  fs::path work_;
  std::optional<DatasetManifest> manifest_;
  std::map<std::string, RomSet> roms_;
  std::optional<ClassifierNet> cls_;
};

struct SplitErrors {
  double phi = 0.0, grad = 0.0;
  std::size_t count = 0, skipped = 0;
  std::string per_state;
};

// Mean over all counted (state, sample) pairs.
SplitErrors split_errors(Desk& desk, const RomSet& rom, Split split) {
  SplitErrors r;
  const auto& m = desk.manifest();
  for (StateKind s : kOrderedStates) {
    const auto data = load_training_samples(desk.dataset_dir(), m, s, split);
    const auto e = reconstruction_errors(rom.at(s), data, m.config.full_order);
    r.phi += e.phi * static_cast<double>(e.count);
    r.grad += e.grad * static_cast<double>(e.count);
    r.count += e.count;
    r.skipped += e.skipped;
    r.per_state += fmt(" %s %.3f/%.3g", to_string(s).data(), e.phi, e.grad);
  }
  if (r.count) {
    r.phi /= static_cast<double>(r.count);
    r.grad /= static_cast<double>(r.count);
  }
  return r;
}

Outcome a6_derivative_informed(Desk& desk) {
  const auto& main = desk.rom_main();
  const auto test = split_errors(desk, main, Split::Test);
  const auto train = split_errors(desk, main, Split::Train);
  const auto abl = split_errors(desk, desk.rom_ablation(), Split::Test);
  std::cout << "  A6 test phi/G per state (DiGCA):" << test.per_state << "\n";
  std::cout << "  A6 test phi/G per state (ablation):" << abl.per_state << "\n";
  std::cout << "  A6 train phi/G per state (DiGCA):" << train.per_state << "\n";
  const bool pass = test.grad < abl.grad && test.phi <= 0.10 && train.phi <= 0.05;
  return {pass, fmt("test G error %.4g vs ablation %.4g; phi test %.4f, train %.4f "
                    "(%zu test / %zu train samples, %zu decayed samples skipped)",
                    test.grad, abl.grad, test.phi, train.phi, test.count, train.count,
                    test.skipped + train.skipped)};
}

Outcome a7_classifier(Desk& desk) {
  const auto& m = desk.manifest();
  int min_branch = 1 << 30;
  for (StateKind s : m.config.branches) min_branch = std::min(min_branch, m.counts[index_of(s)]);
  const auto rep = evaluate_accuracy(desk.classifier(), dataset_features(m, Split::Test));
  return {min_branch >= 40 && rep.accuracy >= 0.90,
          fmt("held-out accuracy %.4f on %zu samples (>= %d per branch, full-order features)", rep.accuracy,
              rep.count, min_branch)};
}

Outcome a8_noise(Desk& desk) {
  const auto& m = desk.manifest();
  const auto& cls = desk.classifier();
  const double clean = evaluate_accuracy(cls, rom_dataset_features(desk.rom_main(), m, Split::Test)).accuracy;
  const double noisy = evaluate_accuracy(cls, rom_dataset_features(desk.rom_noisy(), m, Split::Test)).accuracy;
  const double drop = 100.0 * (clean - noisy);
  return {drop <= 5.0, fmt("surrogate-feature accuracy %.4f clean, %.4f at 10%% noise, drop %.2f pp", clean,
                           noisy, drop)};
}

Outcome a9_speedup(Desk& desk) {
  const auto& rom = desk.rom_main();
  const auto& cls = desk.classifier();
  const auto& m = desk.manifest();
  FullOrderConfig fo = m.config.full_order;
  fo.n_h = 16;
  std::mt19937_64 rng(derive_seed(1, {0x62656e6368}));
  std::uniform_real_distribution<double> ue(m.config.domain.eps_min, m.config.domain.eps_max);
  std::uniform_real_distribution<double> ua(m.config.domain.alpha_min, m.config.domain.alpha_max);
  double min_ratio = 1e300;
  std::string text;
  for (int i = 0; i < 3; ++i) {
    const ParamPoint mu{ue(rng), ua(rng)};
    auto t0 = clock_type::now();
    const auto full = full_order_phase(mu, fo, m.config.domain);
    const double t_full = seconds_since(t0);
    t0 = clock_type::now();
    const auto cl = classify(cls, rom_features(rom, mu, m.config.full_order));
    const double t_rom = seconds_since(t0);
    min_ratio = std::min(min_ratio, t_full / t_rom);
    text += fmt(" [%.2f s vs %.4f s, %s/%s]", t_full, t_rom, to_string(full.label).data(),
                to_string(cl.state).data());
  }
  return {min_ratio >= 10.0, fmt("minimum ratio %.0f over 3 points at n_h=16:", min_ratio) + text};
}

// Phase diagram from the surrogate pipeline against full order, 11 x 11.
Outcome d1_diagram_agreement(Desk& desk) {
  const auto& m = desk.manifest();
  DiagramSpec spec;
  spec.n_eps = 11;
  spec.n_alpha = 11;
  spec.domain = m.config.domain;
  const auto full = assemble_phase_diagram(spec, full_order_source(m.config.full_order, m.config.domain));
  const auto rom = assemble_phase_diagram(spec, rom_source(desk.rom_main(), desk.classifier(), m.config.full_order));
  int agree = 0;
  const int n = static_cast<int>(full.grid.size());
  for (int i = 0; i < n; ++i) agree += full.grid[i].label.has_value() && full.grid[i].label == rom.grid[i].label;
  const double frac = static_cast<double>(agree) / n;
  return {frac >= 0.9, fmt("%d of %d grid labels agree (%.3f)", agree, n, frac)};
}

// ---------------------------------------------------------------------------
// CLI determinism

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) {
      const auto b = bin::read_file(e.path());
      files[fs::relative(e.path(), root).string()] = std::string(b.begin(), b.end());
    }
  return files;
}

// bench.csv without its wall-time columns.
std::string strip_timing(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
    for (std::size_t k = 0; k < std::min<std::size_t>(5, cols.size()); ++k) out += cols[k] + ",";
    out += "\n";
  }
  return out;
}

Outcome a10_determinism(const fs::path& work, const std::string& cli) {
  if (cli.empty()) return {false, "no CLI binary given (--cli)"};
  const fs::path dir = work / "cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "config.json";
  bin::write_text(cfg, R"({
  "solver": {"n_h": 4, "dt": 0.2, "max_steps": 400, "conv_tol": 1e-7},
  "grid": {"n_g": 8, "L": 1},
  "dataset": {"n_per_branch": 2, "branches": ["QC", "C6"], "noise_levels": [0.1]},
  "digca": {"epochs": 3, "hidden": 2, "layers": 1, "kernels": 2, "latent": 2,
            "mlp_hidden": 4, "mlp_layers": 1, "batch": 2},
  "classifier": {"epochs": 20},
  "diagram": {"n_eps": 3, "n_alpha": 3, "image_scale": 2},
  "bench": {"points": 1, "n_h": 4},
  "solve": {"state": "QC", "eps": 0.02, "alpha": 0.5}
})");
  const std::vector<std::string> verbs = {"solve",   "dataset",       "train-ae", "train-classifier",
                                          "predict", "phase-diagram", "bench",    "noise-study"};
  const fs::path out = dir / "out";
  auto run_all = [&]() -> bool {
    for (const auto& v : verbs) {
      const std::string cmd = "\"" + cli + "\" --config \"" + cfg.string() + "\" --seed 3 --out \"" +
                              out.string() + "\" " + v + " > \"" + (dir / "log.txt").string() + "\" 2>&1";
      if (std::system(cmd.c_str()) != 0) return false;
    }
    return true;
  };
  if (!run_all()) return {false, "a command failed, see " + (dir / "log.txt").string()};
  auto first = tree(out);
  if (!run_all()) return {false, "a command failed on the rerun"};
  auto second = tree(out);
  first["bench.csv"] = strip_timing(first["bench.csv"]);
  second["bench.csv"] = strip_timing(second["bench.csv"]);
  std::size_t differ = 0;
  std::string names;
  for (const auto& [k, v] : first)
    if (!second.count(k) || second[k] != v) {
      ++differ;
      names += " " + k;
    }
  const bool pass = differ == 0 && first.size() == second.size() && first.size() > 20;
  return {pass, fmt("%zu output files over 8 commands, %zu differ (bench wall times excluded)", first.size(),
                    differ) + names};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  std::string only, cli;
  std::string work = (fs::temp_directory_path() / "lpq_acceptance").string();
  app.add_option("--only", only, "comma-separated criteria, e.g. A1,A6");
  app.add_option("--work", work, "directory for the desk dataset and trained surrogates");
  app.add_option("--cli", cli, "path of the lpq binary (A10)");
  CLI11_PARSE(app, argc, argv);

  std::set<std::string> wanted;
  std::stringstream ss(only);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) wanted.insert(item);

  Desk desk(work);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"A1", a1_ring_zeros},
      {"A2", a2_convolution},
      {"A3", a3_parseval},
      {"A4", a4_monotone},
      {"A5", a5_ordering},
      {"A6", [&] { return a6_derivative_informed(desk); }},
      {"A7", [&] { return a7_classifier(desk); }},
      {"A8", [&] { return a8_noise(desk); }},
      {"A9", [&] { return a9_speedup(desk); }},
      {"D1", [&] { return d1_diagram_agreement(desk); }},
      {"A10", [&] { return a10_determinism(work, cli); }},
      {"A11", a11_gradients},
  };

  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    if (!wanted.empty() && !wanted.count(name)) continue;
    const auto t0 = clock_type::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << name << " " << (o.pass ? "PASS" : "FAIL") << " " << o.detail
              << fmt(" (%.1f s)", seconds_since(t0)) << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
