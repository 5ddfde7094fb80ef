#include "lpq/commands.hpp"

#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>

#include "lpq/binary_io.hpp"
#include "lpq/classifier.hpp"
#include "lpq/field_io.hpp"
#include "lpq/pipeline.hpp"

namespace lpq::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path out_dir(const RunConfig& c) { return fs::path(c.output); }

DatasetManifest load_dataset(const RunConfig& c) {
  return read_manifest(out_dir(c) / layout::kDataset / "manifest.json");
}

std::string loss_csv(const TrainResult& r) {
  std::string s = "epoch,total,l_s,l_v\n";
  for (std::size_t e = 0; e < r.history.size(); ++e) {
    const auto& h = r.history[e];
    s += std::to_string(e) + "," + fmt(h.total) + "," + fmt(h.l_s) + "," + fmt(h.l_v) + "\n";
  }
  return s;
}

std::string accuracy_text(const AccuracyReport& r) {
  std::ostringstream o;
  o << "accuracy " << fmt(r.accuracy) << "\ncount " << r.count << "\nconfusion (rows true, columns predicted)\n";
  o << "     ";
  for (StateKind s : kAllStates) o << " " << to_string(s);
  o << "\n";
  for (StateKind t : kAllStates) {
    o << to_string(t);
    for (StateKind p : kAllStates) o << " " << r.confusion[index_of(t)][index_of(p)];
    o << "\n";
  }
  return o.str();
}

// Errors of each surrogate on both splits.
std::string error_csv(const RomSet& rom, const fs::path& dataset_dir, const DatasetManifest& m) {
  std::string s = "state,split,phi_rel_l2,grad_rel_l2,count,skipped\n";
  for (StateKind st : kOrderedStates)
    for (Split sp : {Split::Train, Split::Test}) {
      const auto data = load_training_samples(dataset_dir, m, st, sp);
      const auto e = reconstruction_errors(rom.at(st), data, m.config.full_order);
      s += std::string(to_string(st)) + "," + std::string(to_string(sp)) + "," + fmt(e.phi) + "," +
           fmt(e.grad) + "," + std::to_string(e.count) + "," + std::to_string(e.skipped) + "\n";
    }
  return s;
}

ParamPoint solve_point(const RunConfig& c) {
  if (!c.solve.eps) throw ConfigError("missing key: solve.eps");
  if (!c.solve.alpha) throw ConfigError("missing key: solve.alpha");
  return {*c.solve.eps, *c.solve.alpha};
}

}  // namespace

void cmd_solve(const RunConfig& c, std::ostream& log) {
  if (!c.solve.state) throw ConfigError("missing key: solve.state");
  const StateKind state = *c.solve.state;
  if (state == StateKind::Lq) throw ConfigError("solve.state: the liquid has no field to relax");
  const ParamPoint mu = solve_point(c);
  const auto& fo = c.full_order();
  const ModelParams p = fo.params_at(mu);
  RelaxOptions opt;
  opt.amplitude = fo.amplitude;
  opt.seeds = fo.seeds.empty() ? nullptr : &fo.seeds;
  RelaxationResult r;
  try {
    r = relax(state, p, fo.solver, LatticeSpec(fo.n_h), opt);
  } catch (const NonFiniteError& e) {
    throw SolverFailure(std::string("relaxation failed: ") + e.what());
  }
  const fs::path dir = out_dir(c) / layout::kSolve;
  const std::string name(to_string(state));
  write_snapshot(dir / (name + ".lpsf"), r.field);
  write_grid(dir / (name + "_phi.lppg"), reconstruct_physical(r.field, c.grid(), c.dataset.reconstruct_threshold));
  write_grid(dir / (name + "_G.lppg"),
             reconstruct_gradient_term(r.field, c.grid(), p, c.dataset.reconstruct_threshold));
  std::ostringstream rep;
  rep << "state " << name << "\neps " << fmt(mu.eps) << "\nalpha " << fmt(mu.alpha) << "\ne1 "
      << fmt(r.energy.e1) << "\ne2 " << fmt(r.energy.e2) << "\ntotal " << fmt(r.energy.total) << "\nsteps "
      << r.steps_taken << "\nconverged " << (r.converged ? "true" : "false") << "\n";
  bin::write_text(dir / (name + "_energy.txt"), rep.str());
  log << rep.str();
}

void cmd_dataset(const RunConfig& c, std::ostream& log) {
  const fs::path dir = out_dir(c) / layout::kDataset;
  const auto m = generate_dataset(c.dataset, dir);
  log << "draws " << m.draws << "\n";
  for (StateKind s : kAllStates) log << to_string(s) << " " << m.counts[index_of(s)] << "\n";
}

void cmd_train_ae(const RunConfig& c, std::ostream& log) {
  const fs::path data_dir = out_dir(c) / layout::kDataset;
  const auto m = load_dataset(c);
  const fs::path dir = out_dir(c) / layout::kModels;
  auto t = train_rom_set(data_dir, m, c.digca);
  write_rom_set(dir, t.rom);
  for (int k = 0; k < kNumOrdered; ++k) {
    const std::string name(to_string(kOrderedStates[k]));
    bin::write_text(dir / ("digca_" + name + "_loss.csv"), loss_csv(t.results[k]));
    const auto& last = t.results[k].history.back();
    log << name << " loss " << last.total << " (L_s " << last.l_s << ", L_v " << last.l_v << ")\n";
  }
  const auto errors = error_csv(t.rom, data_dir, m);
  bin::write_text(dir / "digca_errors.csv", errors);
  log << errors;
}

void cmd_train_classifier(const RunConfig& c, std::ostream& log) {
  const auto m = load_dataset(c);
  const auto train = dataset_features(m, Split::Train);
  const auto test = dataset_features(m, Split::Test);
  auto [net, res] = train_classifier(train, c.classifier);
  write_classifier(out_dir(c) / layout::kClassifier, net);
  std::string curve = "epoch,cross_entropy\n";
  for (std::size_t e = 0; e < res.history.size(); ++e) curve += std::to_string(e) + "," + fmt(res.history[e]) + "\n";
  bin::write_text(out_dir(c) / layout::kModels / "classifier_loss.csv", curve);
  const std::string rep = "full-order features, train split\n" + accuracy_text(evaluate_accuracy(net, train)) +
                          "full-order features, test split\n" + accuracy_text(evaluate_accuracy(net, test));
  bin::write_text(out_dir(c) / "classifier_report.txt", rep);
  log << rep;
}

void cmd_predict(const RunConfig& c, std::ostream& log) {
  const auto m = load_dataset(c);
  const auto rom = read_rom_set(out_dir(c) / layout::kModels);
  const auto cls = read_classifier(out_dir(c) / layout::kClassifier);
  const fs::path dir = out_dir(c) / layout::kPredict;
  std::ostringstream rep;

  if (c.solve.eps || c.solve.alpha) {
    const ParamPoint mu = solve_point(c);
    const auto& fo = c.full_order();
    const auto e = rom_energies(rom, mu, fo);
    const auto cl = classify(cls, assemble_features(mu, e));
    rep << "eps " << fmt(mu.eps) << "\nalpha " << fmt(mu.alpha) << "\n";
    for (int k = 0; k < kNumOrdered; ++k) rep << "E_" << to_string(kOrderedStates[k]) << " " << fmt(e[k]) << "\n";
    for (StateKind s : kAllStates) rep << "p_" << to_string(s) << " " << fmt(cl.p[index_of(s)]) << "\n";
    rep << "label " << to_string(cl.state) << "\n";
    for (const auto& net : rom.nets) {
      auto pred = net.predict(mu);
      if (pred.grad.empty())
        pred.grad = posthoc_gradient_term(pred.phi, net.arch().n_g, net.graph().dx, fo.params_at(mu));
      const std::string name(to_string(net.state()));
      const double box = net.arch().box;
      write_grid(dir / (name + "_phi.lppg"), PhysicalField{net.arch().n_g, box, std::move(pred.phi)});
      write_grid(dir / (name + "_G.lppg"), PhysicalField{net.arch().n_g, box, std::move(pred.grad)});
    }
  }

  const auto test = rom_dataset_features(rom, m, Split::Test);
  std::string csv = "index,eps,alpha,label,predicted,E_QC,E_C6,E_LQ,E_T6,E_Lam\n";
  AccuracyReport acc = evaluate_accuracy(cls, test);
  const auto tests = m.select(Split::Test);
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto& x = test[i].x;
    const StateKind pred = classify(cls, x).state;
    csv += std::to_string(tests[i]->index) + "," + fmt(x[0]) + "," + fmt(x[1]) + "," +
           std::string(to_string(test[i].label)) + "," + std::string(to_string(pred));
    for (int k = 2; k < kNumFeatures; ++k) csv += "," + fmt(x[k]);
    csv += "\n";
  }
  bin::write_text(dir / "test_predictions.csv", csv);
  rep << "surrogate features, test split\n" << accuracy_text(acc);
  bin::write_text(dir / "report.txt", rep.str());
  log << rep.str();
}

void cmd_phase_diagram(const RunConfig& c, std::ostream& log) {
  DiagramSpec spec;
  spec.n_eps = c.diagram.n_eps;
  spec.n_alpha = c.diagram.n_alpha;
  spec.domain = c.domain();
  spec.refine = c.diagram.refine;
  PhaseDiagram d;
  if (c.diagram.source == "full") {
    d = assemble_phase_diagram(spec, full_order_source(c.full_order(), c.domain()));
  } else {
    const auto rom = read_rom_set(out_dir(c) / layout::kModels);
    const auto cls = read_classifier(out_dir(c) / layout::kClassifier);
    d = assemble_phase_diagram(spec, rom_source(rom, cls, c.full_order()));
  }
  const std::string base = "phase_diagram_" + c.diagram.source;
  bin::write_text(out_dir(c) / (base + ".csv"), diagram_csv(d));
  bin::write_file(out_dir(c) / (base + ".bmp"), diagram_bmp(d, c.diagram.image_scale));
  std::array<int, kNumStates> counts{};
  int unknown = 0;
  for (const auto& p : d.grid) p.label ? ++counts[index_of(*p.label)] : ++unknown;
  for (StateKind s : kAllStates) log << to_string(s) << " " << counts[index_of(s)] << "\n";
  log << "Unknown " << unknown << "\nboundary points " << d.boundary.size() << "\n";
}

void cmd_bench(const RunConfig& c, std::ostream& log) {
  const auto rom = read_rom_set(out_dir(c) / layout::kModels);
  const auto cls = read_classifier(out_dir(c) / layout::kClassifier);
  FullOrderConfig fo = c.full_order();
  fo.n_h = c.bench.n_h;
  std::mt19937_64 rng(derive_seed(c.dataset.seed, {0x62656e6368}));
  std::uniform_real_distribution<double> ue(c.domain().eps_min, c.domain().eps_max);
  std::uniform_real_distribution<double> ua(c.domain().alpha_min, c.domain().alpha_max);

  using clock = std::chrono::steady_clock;
  std::string csv = "index,eps,alpha,full_label,rom_label,full_s,rom_s,cum_full_s,cum_rom_s,ratio\n";
  double cum_full = 0.0, cum_rom = 0.0;
  for (int i = 0; i < c.bench.points; ++i) {
    const ParamPoint mu{ue(rng), ua(rng)};
    auto t0 = clock::now();
    const auto full = full_order_phase(mu, fo, c.domain());
    const double t_full = std::chrono::duration<double>(clock::now() - t0).count();
    t0 = clock::now();
    const auto cl = classify(cls, rom_features(rom, mu, c.full_order()));
    const double t_rom = std::chrono::duration<double>(clock::now() - t0).count();
    cum_full += t_full;
    cum_rom += t_rom;
    const double ratio = t_full / t_rom;
    csv += std::to_string(i) + "," + fmt(mu.eps) + "," + fmt(mu.alpha) + "," + std::string(to_string(full.label)) +
           "," + std::string(to_string(cl.state)) + "," + fmt(t_full) + "," + fmt(t_rom) + "," + fmt(cum_full) +
           "," + fmt(cum_rom) + "," + fmt(ratio) + "\n";
    log << "point " << i << " full " << t_full << " s, surrogate " << t_rom << " s, ratio " << ratio << "\n";
  }
  bin::write_text(out_dir(c) / layout::kBench, csv);
}

void cmd_noise_study(const RunConfig& c, std::ostream& log) {
  const fs::path data_dir = out_dir(c) / layout::kDataset;
  const auto m = load_dataset(c);
  const auto cls = read_classifier(out_dir(c) / layout::kClassifier);
  const auto base_rom = read_rom_set(out_dir(c) / layout::kModels);
  const double base = evaluate_accuracy(cls, rom_dataset_features(base_rom, m, Split::Test)).accuracy;
  log << "baseline accuracy " << base << "\n";
  std::string csv = "level,accuracy,baseline,drop_pp\n";
  for (std::size_t i = 0; i < c.noise_levels.size(); ++i) {
    TrainConfig t = c.digca;
    t.noise = c.noise_levels[i];
    auto tr = train_rom_set(data_dir, m, t);
    char name[32];
    std::snprintf(name, sizeof name, "level_%zu", i);
    write_rom_set(out_dir(c) / layout::kNoise / name, tr.rom);
    const double acc = evaluate_accuracy(cls, rom_dataset_features(tr.rom, m, Split::Test)).accuracy;
    csv += fmt(t.noise) + "," + fmt(acc) + "," + fmt(base) + "," + fmt(100.0 * (base - acc)) + "\n";
    log << "noise " << t.noise << " accuracy " << acc << "\n";
  }
  bin::write_text(out_dir(c) / "noise_study.csv", csv);
}

const std::vector<std::string>& verbs() {
  static const std::vector<std::string> v = {"solve",   "dataset",       "train-ae", "train-classifier",
                                             "predict", "phase-diagram", "bench",    "noise-study"};
  return v;
}

void run_command(const std::string& verb, const RunConfig& c, std::ostream& log) {
  using Fn = void (*)(const RunConfig&, std::ostream&);
  static const std::vector<std::pair<std::string, Fn>> table = {
      {"solve", cmd_solve},     {"dataset", cmd_dataset},             {"train-ae", cmd_train_ae},
      {"train-classifier", cmd_train_classifier},                     {"predict", cmd_predict},
      {"phase-diagram", cmd_phase_diagram}, {"bench", cmd_bench},     {"noise-study", cmd_noise_study}};
  Fn fn = nullptr;
  for (const auto& [name, f] : table)
    if (name == verb) fn = f;
  if (!fn) throw ConfigError("unknown command: " + verb);
  const std::string resolved = to_json(c).dump(2) + "\n";
  log << "command " << verb << "\nseed " << c.dataset.seed << "\nconfig\n" << resolved;
  bin::write_text(out_dir(c) / (verb + "_config.json"), resolved);
  fn(c, log);
}

}  // namespace lpq::cli
