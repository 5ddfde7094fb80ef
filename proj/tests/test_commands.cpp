#include <doctest.h>

#include <map>
#include <sstream>

#include "lpq/binary_io.hpp"
#include "lpq/classifier.hpp"
#include "lpq/commands.hpp"
#include "lpq/config.hpp"
#include "lpq/field_io.hpp"
#include "lpq/pipeline.hpp"
#include "scratch_dir.hpp"

using namespace lpq;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::map<std::string, double> report(const fs::path& p) {
  std::istringstream in(bin::read_text(p));
  std::map<std::string, double> out;
  std::string key, value;
  while (in >> key >> value) {
    if (key == "state") continue;
    if (value == "true" || value == "false")
      out[key] = value == "true";
    else
      out[key] = std::stod(value);
  }
  return out;
}

// Tiny end-to-end configuration.
RunConfig tiny(const fs::path& out) {
  RunConfig c = parse_run_config(R"({
    "solver": {"n_h": 4, "dt": 0.2, "max_steps": 400, "conv_tol": 1e-7},
    "grid": {"n_g": 8, "L": 1},
    "dataset": {"n_per_branch": 2, "branches": ["QC", "C6"], "noise_levels": [0.1]},
    "digca": {"epochs": 3, "hidden": 2, "layers": 1, "kernels": 2, "latent": 2,
              "mlp_hidden": 4, "mlp_layers": 1, "batch": 2},
    "classifier": {"epochs": 20},
    "diagram": {"n_eps": 3, "n_alpha": 3, "source": "rom", "image_scale": 2},
    "solve": {"eps": 0.02, "alpha": 0.5},
    "seed": 4
  })");
  c.output = out.string();
  return c;
}

std::map<std::string, std::string> snapshot_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) {
      const auto b = bin::read_file(e.path());
      files[fs::relative(e.path(), root).string()] = std::string(b.begin(), b.end());
    }
  return files;
}

}  // namespace

TEST_CASE("empty config resolves to the defaults") {
  const auto c = parse_run_config("{}");
  CHECK(c.full_order().n_h == 8);
  CHECK(c.grid().n_g == 256);
  CHECK(c.dataset.n_per_branch == 200);
  CHECK(c.dataset.r_t == 0.75);
  CHECK(c.digca.lambda_u == 1.0);
  CHECK(c.classifier.epochs == 3000);
  CHECK(c.diagram.source == "full");
  CHECK_FALSE(c.solve.state.has_value());
}

TEST_CASE("config values are read from every section") {
  const auto c = parse_run_config(R"({
    "model": {"c": 2.0},
    "solver": {"n_h": 16, "dt": 0.05},
    "grid": {"n_g": 64, "L": 8},
    "domain": {"eps_min": 0.0, "eps_max": 0.04},
    "dataset": {"n_per_branch": 40, "noise_levels": [0.1], "batch": 3},
    "digca": {"epochs": 7, "lambda_u": 0, "lr_min": 1e-5, "mlp_w0": 10},
    "classifier": {"lr": 0.01},
    "diagram": {"n_eps": 11, "refine": true, "source": "rom"},
    "bench": {"points": 2},
    "solve": {"state": "Lam", "eps": -0.01, "alpha": 0},
    "output": "elsewhere", "threads": 2, "seed": 9
  })");
  CHECK(c.full_order().c_pen == 2.0);
  CHECK(c.full_order().n_h == 16);
  CHECK(c.full_order().solver.dt == 0.05);
  CHECK(c.grid().n_g == 64);
  CHECK(c.grid().box_multiplier == 8.0);
  CHECK(c.domain().eps_max == 0.04);
  CHECK(c.dataset.batch == 3);
  CHECK(c.noise_levels == std::vector<double>{0.1});
  CHECK(c.digca.epochs == 7);
  CHECK(c.digca.lambda_u == 0.0);
  CHECK(c.digca.lr_min == 1e-5);
  CHECK(c.digca.mlp_w0 == 10.0);
  CHECK(c.classifier.lr == 0.01);
  CHECK(c.diagram.refine);
  CHECK(c.bench.points == 2);
  CHECK(*c.solve.state == StateKind::Lam);
  CHECK(c.output == "elsewhere");
  CHECK(c.threads == 2);
  CHECK(c.dataset.seed == 9);
  CHECK(c.digca.seed == 9);
  CHECK(c.classifier.seed == 9);
}

TEST_CASE("config rejects unknown keys and bad values") {
  CHECK(error_of(R"({"bogus": 1})") == "unknown key: bogus");
  CHECK(error_of(R"({"solver": {"nh": 8}})") == "unknown key: solver.nh");
  CHECK(error_of(R"({"dataset": {"extra": 8}})") == "unknown key: dataset.extra");
  CHECK(error_of(R"({"digca": {"epoch": 8}})") == "unknown key: digca.epoch");
  CHECK(error_of(R"({"solve": {"state": "XX"}})").find("solve.state") != std::string::npos);
  CHECK(error_of(R"({"solver": {"dt": "fast"}})").find("solver.dt") != std::string::npos);
  CHECK(error_of(R"({"diagram": {"source": "guess"}})").find("diagram.source") != std::string::npos);
  CHECK(error_of(R"({"digca": {"lr": 1e-3, "lr_min": 1e-2}})").find("lr_min") != std::string::npos);
  CHECK(error_of(R"({"digca": {"mlp_w0": 0}})").find("mlp_w0") != std::string::npos);
  CHECK(error_of(R"({"dataset": {"noise_levels": [-0.1]}})").find("noise_levels") != std::string::npos);
  CHECK(error_of("{not json").find("JSON") != std::string::npos);
  CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("resolved config round-trips through its JSON echo") {
  auto c = parse_run_config(R"({"solve": {"state": "QC", "eps": 0.01}, "seed": 3})");
  const auto text = to_json(c).dump();
  const auto d = parse_run_config(text);
  CHECK(to_json(d).dump() == text);
}

TEST_CASE("solve writes the relaxed state and an energy report") {
  ScratchDir dir("cli_solve");
  auto c = parse_run_config(R"({"grid": {"n_g": 16, "L": 2},
                               "solve": {"state": "QC", "eps": 5e-6, "alpha": 0.7071}})");
  c.output = dir.path.string();
  std::ostringstream log;
  cli::run_command("solve", c, log);
  const auto r = report(dir.path / "solve/QC_energy.txt");
  CHECK(r.at("total") < 0.0);
  CHECK(r.at("converged") == 1.0);
  CHECK(r.at("total") == doctest::Approx(r.at("e1") + r.at("e2")).epsilon(1e-12));
  CHECK(read_snapshot(dir.path / "solve/QC.lpsf").spec().n_h == 8);
  CHECK(read_grid(dir.path / "solve/QC_phi.lppg").n_g == 16);
  CHECK(fs::exists(dir.path / "solve/QC_G.lppg"));
  CHECK(fs::exists(dir.path / "solve_config.json"));
  CHECK(log.str().find("seed 0") != std::string::npos);

  c.solve.state = StateKind::Lam;
  c.solve.eps = -0.01;
  c.solve.alpha = 0.0;
  cli::run_command("solve", c, log);
  CHECK(std::abs(report(dir.path / "solve/Lam_energy.txt").at("total")) <= 1e-8);
}

TEST_CASE("solve names the missing key") {
  auto c = parse_run_config(R"({"solve": {"eps": 0.01, "alpha": 0.5}})");
  ScratchDir dir("cli_missing");
  c.output = dir.path.string();
  std::ostringstream log;
  CHECK_THROWS_WITH_AS(cli::run_command("solve", c, log), "missing key: solve.state", ConfigError);
  CHECK_THROWS_AS(cli::run_command("fly", c, log), ConfigError);
}

TEST_CASE("commands report the absent artifact") {
  ScratchDir dir("cli_artifacts");
  auto c = tiny(dir.path);
  std::ostringstream log;
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"train-ae", "manifest.json"}, {"train-classifier", "manifest.json"}, {"predict", "manifest.json"},
      {"noise-study", "manifest.json"}, {"bench", "digca_QC.dgca"}};
  for (const auto& [verb, file] : cases) {
    try {
      cli::run_command(verb, c, log);
      FAIL("expected MissingArtifact from " << verb);
    } catch (const MissingArtifact& e) {
      CHECK_MESSAGE(std::string(e.what()).find(file) != std::string::npos, e.what());
    }
  }
}

TEST_CASE("tiny pipeline runs end to end and reruns byte-identically") {
  ScratchDir dir("cli_pipeline");
  const auto c = tiny(dir.path);
  const std::vector<std::string> verbs = {"dataset", "train-ae", "train-classifier",
                                          "predict", "phase-diagram", "noise-study"};
  std::ostringstream log;
  for (const auto& v : verbs) cli::run_command(v, c, log);

  for (const char* f : {"dataset/manifest.json", "models/digca_QC.dgca", "models/digca_Lam_loss.csv",
                        "models/digca_errors.csv", "models/classifier.lpcl", "classifier_report.txt",
                        "predict/report.txt", "predict/test_predictions.csv", "predict/C6_phi.lppg",
                        "phase_diagram_rom.csv", "phase_diagram_rom.bmp", "noise_study.csv",
                        "noise/level_0/digca_T6.dgca", "train-ae_config.json"})
    CHECK_MESSAGE(fs::exists(dir.path / f), f);

  const auto rows = parse_diagram_csv(bin::read_text(dir.path / "phase_diagram_rom.csv"));
  CHECK(rows.size() == 9);
  CHECK(read_rom_set(dir.path / "models").nets.size() == 5);

  const auto first = snapshot_tree(dir.path);
  for (const auto& v : verbs) cli::run_command(v, c, log);
  const auto second = snapshot_tree(dir.path);
  REQUIRE(first.size() == second.size());
  for (const auto& [name, bytes] : first) CHECK_MESSAGE(second.at(name) == bytes, name);
}
