#include "lpq/sweep.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <random>
#include <sstream>

#include "lpq/binary_io.hpp"
#include "lpq/config_json.hpp"
#include "lpq/field_io.hpp"

namespace lpq {

void Domain::validate() const {
  if (!(eps_min < eps_max)) throw ConfigError("domain: eps_min must be below eps_max");
  if (!(alpha_min < alpha_max)) throw ConfigError("domain: alpha_min must be below alpha_max");
}

ModelParams FullOrderConfig::params_at(const ParamPoint& mu) const {
  return ModelParams::with_scale(c_pen, q, mu.eps, mu.alpha);
}

void FullOrderConfig::validate() const {
  LatticeSpec spec(n_h);
  solver.validate();
  if (!(amplitude > 0.0)) throw ConfigError("solver.amplitude must be positive");
  params_at({}).validate();
  (void)spec;
}

std::array<double, kNumOrdered> PhaseEvaluation::totals() const {
  std::array<double, kNumOrdered> t{};
  for (int k = 0; k < kNumOrdered; ++k) t[k] = relaxed[k].energy.total;
  return t;
}

StateKind label_from_energies(const std::array<double, kNumOrdered>& totals) {
  StateKind best = StateKind::QC;
  double best_e = totals[0];
  for (int k = 1; k <= kNumOrdered; ++k) {
    const double e = k < kNumOrdered ? totals[k] : 0.0;
    if (e < best_e - kTieTolerance) {
      best = kAllStates[k];
      best_e = e;
    }
  }
  return best;
}

PhaseEvaluation full_order_phase(const ParamPoint& mu, const FullOrderConfig& cfg,
                                 const Domain& domain,
                                 const std::array<StateKind, kNumOrdered>& order) {
  if (!domain.contains(mu)) throw ConfigError("full_order_phase: parameter point outside the domain");
  const ModelParams p = cfg.params_at(mu);
  const LatticeSpec spec(cfg.n_h);
  RelaxOptions opt;
  opt.amplitude = cfg.amplitude;
  opt.seeds = cfg.seeds.empty() ? nullptr : &cfg.seeds;

  PhaseEvaluation out;
  for (StateKind s : order) {
    try {
      out.relaxed[index_of(s)] = relax(s, p, cfg.solver, spec, opt);
    } catch (const NonFiniteError& e) {
      std::ostringstream msg;
      msg << "relaxation of " << to_string(s) << " at (" << mu.eps << ", " << mu.alpha
          << ") failed: " << e.what();
      throw SolverFailure(msg.str());
    }
  }
  out.label = label_from_energies(out.totals());
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::vector<std::uint32_t> words;
  words.push_back(static_cast<std::uint32_t>(seed));
  words.push_back(static_cast<std::uint32_t>(seed >> 32));
  for (auto t : tags) {
    words.push_back(static_cast<std::uint32_t>(t));
    words.push_back(static_cast<std::uint32_t>(t >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

PhysicalField add_noise(const PhysicalField& grid, double level, std::uint64_t seed) {
  if (!(level >= 0.0)) throw ConfigError("noise level must be non-negative");
  PhysicalField out = grid;
  const std::size_t n = grid.values.size();
  if (level == 0.0 || n == 0) return out;
  double mean = 0.0;
  for (double v : grid.values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : grid.values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  if (sd == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  for (auto& v : out.values) v += level * sd * z(rng);
  return out;
}

// ---------------------------------------------------------------------------
// Dataset

std::string_view to_string(Split s) { return s == Split::Train ? "train" : "test"; }

std::array<double, kNumOrdered> PhaseSample::totals() const {
  std::array<double, kNumOrdered> t{};
  for (int k = 0; k < kNumOrdered; ++k) t[k] = energies[k].total;
  return t;
}

void DatasetConfig::validate() const {
  if (n_per_branch < 1) throw ConfigError("dataset.n_per_branch must be at least 1");
  if (!(r_t > 0.0 && r_t < 1.0)) throw ConfigError("dataset.r_t must lie in (0, 1)");
  if (branches.empty()) throw ConfigError("dataset.branches must not be empty");
  for (std::size_t i = 0; i < branches.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (branches[i] == branches[j]) throw ConfigError("dataset.branches has duplicates");
  if (!(reconstruct_threshold >= 0.0)) throw ConfigError("dataset.threshold must be non-negative");
  if (batch < 0) throw ConfigError("dataset.batch must be non-negative");
  domain.validate();
  full_order.validate();
  grid.validate();
}

std::vector<const PhaseSample*> DatasetManifest::select(std::optional<Split> split,
                                                        std::optional<StateKind> label) const {
  std::vector<const PhaseSample*> out;
  for (const auto& s : samples)
    if ((!split || s.split == *split) && (!label || s.label == *label)) out.push_back(&s);
  return out;
}

namespace {

struct DrawResult {
  ParamPoint mu;
  std::optional<PhaseEvaluation> eval;
  std::exception_ptr error;
};

ParamPoint draw_point(const DatasetConfig& cfg, std::size_t draw) {
  std::mt19937_64 rng(derive_seed(cfg.seed, {0x6d75u, draw}));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a = u(rng), b = u(rng);
  return {cfg.domain.eps_min + a * (cfg.domain.eps_max - cfg.domain.eps_min),
          cfg.domain.alpha_min + b * (cfg.domain.alpha_max - cfg.domain.alpha_min)};
}

std::string sample_dir(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "samples/%06zu", index);
  return buf;
}

struct SampleArtifacts {
  std::array<std::vector<char>, kNumOrdered> snapshot, phi, grad;
};

SampleArtifacts render(const DatasetConfig& cfg, const ParamPoint& mu, const PhaseEvaluation& ev) {
  SampleArtifacts a;
  const ModelParams p = cfg.full_order.params_at(mu);
  for (int k = 0; k < kNumOrdered; ++k) {
    const auto& f = ev.relaxed[k].field;
    a.snapshot[k] = encode_snapshot(f);
    a.phi[k] = encode_grid(reconstruct_physical(f, cfg.grid, cfg.reconstruct_threshold));
    a.grad[k] = encode_grid(reconstruct_gradient_term(f, cfg.grid, p, cfg.reconstruct_threshold));
  }
  return a;
}

void assign_splits(DatasetManifest& m) {
  const auto& cfg = m.config;
  for (auto branch : kAllStates) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < m.samples.size(); ++i)
      if (m.samples[i].label == branch) idx.push_back(i);
    std::mt19937_64 rng(derive_seed(cfg.seed, {0x73706cu, static_cast<std::uint64_t>(index_of(branch))}));
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng() % i]);
    const auto n_train = static_cast<std::size_t>(std::llround(cfg.r_t * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < idx.size(); ++i)
      m.samples[idx[i]].split = i < n_train ? Split::Train : Split::Test;
  }
}

}  // namespace

DatasetManifest generate_dataset(const DatasetConfig& cfg, const std::filesystem::path& dir) {
  cfg.validate();
  std::filesystem::create_directories(dir);
  DatasetManifest m;
  m.config = cfg;

  std::array<bool, kNumStates> wanted{};
  for (auto s : cfg.branches) wanted[index_of(s)] = true;
  auto filled = [&] {
    for (auto s : cfg.branches)
      if (m.counts[index_of(s)] < cfg.n_per_branch) return false;
    return true;
  };

  const std::size_t cap = cfg.draw_cap();
  const std::size_t batch =
      cfg.batch > 0 ? static_cast<std::size_t>(cfg.batch) : static_cast<std::size_t>(2 * omp_get_max_threads());
  std::size_t next = 0;
  while (!filled() && next < cap) {
    const std::size_t n = std::min(batch, cap - next);
    std::vector<DrawResult> round(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t k = 0; k < n; ++k) {
      auto& r = round[k];
      r.mu = draw_point(cfg, next + k);
      try {
        r.eval = full_order_phase(r.mu, cfg.full_order, cfg.domain);
      } catch (...) {
        r.error = std::current_exception();
      }
    }

    // Acceptance runs in draw order so that the batch size never matters.
    std::vector<std::size_t> accepted;
    for (std::size_t k = 0; k < n && !filled(); ++k) {
      auto& r = round[k];
      m.draws = next + k + 1;
      if (r.error) std::rethrow_exception(r.error);
      const int li = index_of(r.eval->label);
      if (!wanted[li] || m.counts[li] >= cfg.n_per_branch) continue;
      ++m.counts[li];
      accepted.push_back(k);
    }

    std::vector<SampleArtifacts> art(accepted.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t a = 0; a < accepted.size(); ++a)
      art[a] = render(cfg, round[accepted[a]].mu, *round[accepted[a]].eval);

    for (std::size_t a = 0; a < accepted.size(); ++a) {
      const auto& r = round[accepted[a]];
      PhaseSample s;
      s.index = m.samples.size();
      s.draw = next + accepted[a];
      s.mu = r.mu;
      s.label = r.eval->label;
      const std::string sd = sample_dir(s.index);
      for (int k = 0; k < kNumOrdered; ++k) {
        const auto& rel = r.eval->relaxed[k];
        s.energies[k] = rel.energy;
        s.steps[k] = rel.steps_taken;
        s.converged[k] = rel.converged;
        const std::string name(to_string(kOrderedStates[k]));
        s.files[k] = {sd + "/" + name + ".lpsf", sd + "/" + name + "_phi.lppg",
                      sd + "/" + name + "_G.lppg"};
        bin::write_file(dir / s.files[k].snapshot, art[a].snapshot[k]);
        bin::write_file(dir / s.files[k].phi, art[a].phi[k]);
        bin::write_file(dir / s.files[k].grad, art[a].grad[k]);
      }
      m.samples.push_back(std::move(s));
    }
    next += n;
  }

  m.complete = filled();
  assign_splits(m);
  write_manifest(dir / "manifest.json", m);
  if (!m.complete) {
    std::ostringstream msg;
    msg << "draw cap of " << cap << " reached before filling every branch (";
    for (auto s : cfg.branches) msg << ' ' << to_string(s) << '=' << m.counts[index_of(s)];
    msg << " )";
    throw BranchExhausted(msg.str(), m);
  }
  return m;
}

std::string manifest_to_json(const DatasetManifest& m) {
  Json j;
  j["schema_version"] = DatasetManifest::kSchemaVersion;
  j["complete"] = m.complete;
  j["draws"] = m.draws;
  Json counts = Json::object();
  for (auto s : kAllStates) counts[std::string(to_string(s))] = m.counts[index_of(s)];
  j["counts"] = counts;
  j["config"] = full_dataset_json(m.config);
  Json samples = Json::array();
  for (const auto& s : m.samples) {
    Json e = Json::object(), f = Json::object();
    for (int k = 0; k < kNumOrdered; ++k) {
      const std::string name(to_string(kOrderedStates[k]));
      e[name] = {{"e1", s.energies[k].e1},
                 {"e2", s.energies[k].e2},
                 {"total", s.energies[k].total},
                 {"steps", s.steps[k]},
                 {"converged", s.converged[k]}};
      f[name] = {{"snapshot", s.files[k].snapshot}, {"phi", s.files[k].phi}, {"G", s.files[k].grad}};
    }
    samples.push_back({{"index", s.index},
                       {"draw", s.draw},
                       {"eps", s.mu.eps},
                       {"alpha", s.mu.alpha},
                       {"label", std::string(to_string(s.label))},
                       {"split", std::string(to_string(s.split))},
                       {"energies", e},
                       {"files", f}});
  }
  j["samples"] = samples;
  return j.dump(1) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
  DatasetManifest m;
  try {
    JsonObject o(j, "");
    int version = 0;
    o.require("schema_version", version);
    if (version != DatasetManifest::kSchemaVersion) throw FormatError("manifest: unsupported schema version");
    o.require("complete", m.complete);
    o.require("draws", m.draws);
    JsonObject counts = o.child("counts");
    for (auto s : kAllStates) counts.require(std::string(to_string(s)), m.counts[index_of(s)]);
    counts.finish();
    m.config = read_full_dataset(o.raw("config"));
    const Json& samples = o.raw("samples");
    if (!samples.is_array()) throw FormatError("manifest: samples must be a list");
    for (const auto& sj : samples) {
      JsonObject so(sj, "sample");
      PhaseSample s;
      so.require("index", s.index);
      so.require("draw", s.draw);
      so.require("eps", s.mu.eps);
      so.require("alpha", s.mu.alpha);
      s.label = state_from_json(so.raw("label"), "sample.label");
      std::string split;
      so.require("split", split);
      if (split != "train" && split != "test") throw FormatError("manifest: bad split tag " + split);
      s.split = split == "train" ? Split::Train : Split::Test;
      JsonObject e = so.child("energies"), f = so.child("files");
      for (int k = 0; k < kNumOrdered; ++k) {
        const std::string name(to_string(kOrderedStates[k]));
        JsonObject ek = e.child(name), fk = f.child(name);
        ek.require("e1", s.energies[k].e1);
        ek.require("e2", s.energies[k].e2);
        ek.require("total", s.energies[k].total);
        ek.require("steps", s.steps[k]);
        ek.require("converged", s.converged[k]);
        ek.finish();
        fk.require("snapshot", s.files[k].snapshot);
        fk.require("phi", s.files[k].phi);
        fk.require("G", s.files[k].grad);
        fk.finish();
      }
      e.finish();
      f.finish();
      so.finish();
      m.samples.push_back(std::move(s));
    }
    o.finish();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
  return m;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
  bin::write_text(path, manifest_to_json(m));
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  return manifest_from_json(bin::read_text(path));
}

SampleGrids load_sample_grids(const std::filesystem::path& dir, const PhaseSample& s, StateKind state) {
  const auto& f = s.files[index_of(state)];
  return {read_grid(dir / f.phi), read_grid(dir / f.grad)};
}

// ---------------------------------------------------------------------------
// Phase diagrams

void DiagramSpec::validate() const {
  if (n_eps < 2 || n_alpha < 2) throw ConfigError("diagram: need at least 2 points per axis");
  domain.validate();
}

namespace {

DiagramPoint evaluate_point(const LabelSource& source, const ParamPoint& mu) {
  DiagramPoint d;
  d.mu = mu;
  try {
    auto r = source(mu);
    d.label = r.label;
    d.energies = r.energies;
  } catch (const std::exception&) {
  }
  return d;
}

void evaluate_all(const LabelSource& source, std::vector<DiagramPoint>& pts) {
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t k = 0; k < pts.size(); ++k) pts[k] = evaluate_point(source, pts[k].mu);
}

ParamPoint midpoint(const ParamPoint& a, const ParamPoint& b) {
  return {0.5 * (a.eps + b.eps), 0.5 * (a.alpha + b.alpha)};
}

}  // namespace

PhaseDiagram assemble_phase_diagram(const DiagramSpec& spec, const LabelSource& source) {
  spec.validate();
  PhaseDiagram d;
  d.spec = spec;
  const auto& dom = spec.domain;
  d.grid.resize(static_cast<std::size_t>(spec.n_eps) * spec.n_alpha);
  for (int ia = 0; ia < spec.n_alpha; ++ia)
    for (int ie = 0; ie < spec.n_eps; ++ie) {
      auto& pt = d.grid[static_cast<std::size_t>(ia) * spec.n_eps + ie];
      pt.mu.eps = std::lerp(dom.eps_min, dom.eps_max, static_cast<double>(ie) / (spec.n_eps - 1));
      pt.mu.alpha = std::lerp(dom.alpha_min, dom.alpha_max, static_cast<double>(ia) / (spec.n_alpha - 1));
    }
  evaluate_all(source, d.grid);

  // Edges whose endpoints disagree, horizontal edges first.
  struct Edge {
    const DiagramPoint* a;
    const DiagramPoint* b;
  };
  std::vector<Edge> edges;
  for (int ia = 0; ia < spec.n_alpha; ++ia)
    for (int ie = 0; ie + 1 < spec.n_eps; ++ie) edges.push_back({&d.at(ie, ia), &d.at(ie + 1, ia)});
  for (int ia = 0; ia + 1 < spec.n_alpha; ++ia)
    for (int ie = 0; ie < spec.n_eps; ++ie) edges.push_back({&d.at(ie, ia), &d.at(ie, ia + 1)});
  std::erase_if(edges, [](const Edge& e) { return e.a->label == e.b->label; });

  if (!spec.refine) {
    for (const auto& e : edges) d.boundary.push_back(midpoint(e.a->mu, e.b->mu));
    return d;
  }
  d.refined.resize(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) d.refined[k].mu = midpoint(edges[k].a->mu, edges[k].b->mu);
  evaluate_all(source, d.refined);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& m = d.refined[k];
    if (m.label != edges[k].a->label) d.boundary.push_back(midpoint(edges[k].a->mu, m.mu));
    if (m.label != edges[k].b->label) d.boundary.push_back(midpoint(m.mu, edges[k].b->mu));
  }
  return d;
}

LabelSource full_order_source(const FullOrderConfig& cfg, const Domain& domain) {
  return [cfg, domain](const ParamPoint& mu) {
    const auto ev = full_order_phase(mu, cfg, domain);
    return LabelOutcome{ev.label, ev.totals()};
  };
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void csv_row(std::string& out, const DiagramPoint& p) {
  out += fmt(p.mu.eps) + "," + fmt(p.mu.alpha) + ",";
  out += p.label ? std::string(to_string(*p.label)) : std::string("Unknown");
  for (int k = 0; k < kNumOrdered; ++k) {
    out += ",";
    if (p.energies) out += fmt((*p.energies)[k]);
  }
  out += "\n";
}

}  // namespace

std::string diagram_csv(const PhaseDiagram& d) {
  std::string out = "eps,alpha,label,E_QC,E_C6,E_LQ,E_T6,E_Lam\n";
  for (const auto& p : d.grid) csv_row(out, p);
  for (const auto& p : d.refined) csv_row(out, p);
  return out;
}

std::vector<CsvRow> parse_diagram_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "eps,alpha,label,E_QC,E_C6,E_LQ,E_T6,E_Lam")
    throw FormatError("diagram csv: bad header");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto pos = line.find(',', start);
      cells.push_back(line.substr(start, pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (cells.size() != 8) throw FormatError("diagram csv: expected 8 columns");
    CsvRow r;
    try {
      r.mu = {std::stod(cells[0]), std::stod(cells[1])};
      if (cells[2] != "Unknown") {
        r.label = parse_state(cells[2]);
        if (!r.label) throw FormatError("diagram csv: bad label " + cells[2]);
      }
      if (!cells[3].empty()) {
        std::array<double, kNumOrdered> e{};
        for (int k = 0; k < kNumOrdered; ++k) e[k] = std::stod(cells[3 + k]);
        r.energies = e;
      }
    } catch (const std::logic_error&) {
      throw FormatError("diagram csv: bad number");
    }
    rows.push_back(r);
  }
  return rows;
}

const std::array<Rgb, 7>& diagram_palette() {
  static const std::array<Rgb, 7> p = {{
      {0xd6, 0x27, 0x28},  // QC   red
      {0x1f, 0x77, 0xb4},  // C6   blue
      {0x2c, 0xa0, 0x2c},  // LQ   green
      {0xff, 0x7f, 0x0e},  // T6   orange
      {0x94, 0x67, 0xbd},  // Lam  purple
      {0xc7, 0xc7, 0xc7},  // Lq   light gray
      {0x00, 0x00, 0x00},  // Unknown
  }};
  return p;
}

std::vector<char> diagram_bmp(const PhaseDiagram& d, int scale) {
  if (scale < 1) throw ConfigError("diagram image scale must be positive");
  const int w = d.spec.n_eps * scale, h = d.spec.n_alpha * scale;
  const int stride = (w + 3) / 4 * 4;
  const auto& pal = diagram_palette();
  const std::uint32_t palette_bytes = 4 * 256;
  const std::uint32_t offset = 14 + 40 + palette_bytes;
  const std::uint32_t image_bytes = static_cast<std::uint32_t>(stride) * h;

  bin::Writer out;
  out.magic("BM");
  out.u32(offset + image_bytes);
  out.u32(0);
  out.u32(offset);
  out.u32(40);
  out.u32(static_cast<std::uint32_t>(w));
  out.u32(static_cast<std::uint32_t>(h));  // positive height: bottom-up rows
  out.u32(1 | (8u << 16));                 // planes, bits per pixel
  out.u32(0);                              // BI_RGB
  out.u32(image_bytes);
  out.u32(2835);
  out.u32(2835);
  out.u32(256);
  out.u32(0);
  for (int k = 0; k < 256; ++k) {
    const Rgb c = k < 7 ? pal[k] : Rgb{0, 0, 0};
    out.u32(static_cast<std::uint32_t>(c.b) | (static_cast<std::uint32_t>(c.g) << 8) |
            (static_cast<std::uint32_t>(c.r) << 16));
  }
  std::vector<char> row(stride);
  std::vector<char> bytes = out.bytes();
  for (int y = 0; y < h; ++y) {
    const int ia = y / scale;
    std::fill(row.begin(), row.end(), 0);
    for (int x = 0; x < w; ++x) {
      const auto& lbl = d.at(x / scale, ia).label;
      row[x] = static_cast<char>(lbl ? index_of(*lbl) : 6);
    }
    bytes.insert(bytes.end(), row.begin(), row.end());
  }
  return bytes;
}

}  // namespace lpq
