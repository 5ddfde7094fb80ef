#include "lpq/config.hpp"

#include "lpq/binary_io.hpp"
#include "lpq/config_json.hpp"

namespace lpq {

void RunConfig::set_seed(std::uint64_t seed) {
  dataset.seed = seed;
  digca.seed = seed;
  classifier.seed = seed;
}

void RunConfig::validate() const {
  dataset.validate();
  digca.validate();
  classifier.validate();
  for (double l : noise_levels)
    if (!(l >= 0.0)) throw ConfigError("dataset.noise_levels must be non-negative");
  if (diagram.n_eps < 2 || diagram.n_alpha < 2) throw ConfigError("diagram needs at least 2 points per axis");
  if (diagram.source != "full" && diagram.source != "rom")
    throw ConfigError("diagram.source must be \"full\" or \"rom\"");
  if (diagram.image_scale < 1) throw ConfigError("diagram.image_scale must be positive");
  if (bench.points < 1) throw ConfigError("bench.points must be positive");
  LatticeSpec check(bench.n_h);
  (void)check;
  if (threads < 0) throw ConfigError("threads must be non-negative");
  if (output.empty()) throw ConfigError("output must not be empty");
}

namespace {

void read_digca(JsonObject o, TrainConfig& t) {
  o.get("lambda", t.lambda);
  o.get("lambda_u", t.lambda_u);
  o.get("lr", t.lr);
  o.get("lr_min", t.lr_min);
  o.get("epochs", t.epochs);
  o.get("batch", t.batch);
  o.get("latent", t.latent);
  o.get("kernels", t.kernels);
  o.get("layers", t.layers);
  o.get("hidden", t.hidden);
  o.get("mlp_hidden", t.mlp_hidden);
  o.get("mlp_layers", t.mlp_layers);
  o.get("mlp_w0", t.mlp_w0);
  o.get("seed", t.seed);
  o.get("noise", t.noise);
  o.finish();
}

Json digca_json(const TrainConfig& t) {
  return {{"lambda", t.lambda},   {"lambda_u", t.lambda_u}, {"lr", t.lr}, {"lr_min", t.lr_min},
          {"epochs", t.epochs},   {"batch", t.batch},       {"latent", t.latent},
          {"kernels", t.kernels}, {"layers", t.layers},     {"hidden", t.hidden},
          {"mlp_hidden", t.mlp_hidden}, {"mlp_layers", t.mlp_layers}, {"mlp_w0", t.mlp_w0}, {"seed", t.seed},
          {"noise", t.noise}};
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  JsonObject o(j, "");
  std::uint64_t seed = 0;
  if (o.get("seed", seed)) c.set_seed(seed);
  read_model(o.child("model"), c.dataset.full_order);
  read_solver(o.child("solver"), c.dataset.full_order);
  read_grid(o.child("grid"), c.dataset.grid);
  read_domain(o.child("domain"), c.dataset.domain);
  {
    JsonObject d = o.child("dataset");
    d.get("noise_levels", c.noise_levels);
    d.get("batch", c.dataset.batch);
    // the remaining dataset keys are shared with the manifest reader
    Json rest = Json::object();
    const Json& raw = j.contains("dataset") ? j["dataset"] : Json::object();
    for (const auto& [k, v] : raw.items())
      if (k != "noise_levels" && k != "batch") rest[k] = v;
    const int batch = c.dataset.batch;
    read_dataset(JsonObject(rest, "dataset"), c.dataset);
    c.dataset.batch = batch;
    for (const auto& [k, v] : raw.items()) d.raw(k);
    d.finish();
  }
  read_digca(o.child("digca"), c.digca);
  {
    JsonObject k = o.child("classifier");
    k.get("epochs", c.classifier.epochs);
    k.get("lr", c.classifier.lr);
    k.get("batch", c.classifier.batch);
    k.get("seed", c.classifier.seed);
    k.finish();
  }
  {
    JsonObject d = o.child("diagram");
    d.get("n_eps", c.diagram.n_eps);
    d.get("n_alpha", c.diagram.n_alpha);
    d.get("refine", c.diagram.refine);
    d.get("source", c.diagram.source);
    d.get("image_scale", c.diagram.image_scale);
    d.finish();
  }
  {
    JsonObject b = o.child("bench");
    b.get("points", c.bench.points);
    b.get("n_h", c.bench.n_h);
    b.finish();
  }
  {
    JsonObject s = o.child("solve");
    if (s.has("state")) c.solve.state = state_from_json(s.raw("state"), "solve.state");
    double v = 0.0;
    if (s.get("eps", v)) c.solve.eps = v;
    if (s.get("alpha", v)) c.solve.alpha = v;
    s.finish();
  }
  o.get("output", c.output);
  o.get("threads", c.threads);
  o.finish();
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::string text;
  try {
    text = bin::read_text(path);
  } catch (const MissingArtifact&) {
    throw ConfigError("config file not found: " + path);
  }
  return parse_run_config(text);
}

Json to_json(const RunConfig& c) {
  Json j = full_dataset_json(c.dataset);
  j["dataset"]["batch"] = c.dataset.batch;
  j["dataset"]["noise_levels"] = c.noise_levels;
  j["digca"] = digca_json(c.digca);
  j["classifier"] = {{"epochs", c.classifier.epochs},
                     {"lr", c.classifier.lr},
                     {"batch", c.classifier.batch},
                     {"seed", c.classifier.seed}};
  j["diagram"] = {{"n_eps", c.diagram.n_eps},
                  {"n_alpha", c.diagram.n_alpha},
                  {"refine", c.diagram.refine},
                  {"source", c.diagram.source},
                  {"image_scale", c.diagram.image_scale}};
  j["bench"] = {{"points", c.bench.points}, {"n_h", c.bench.n_h}};
  Json s = Json::object();
  if (c.solve.state) s["state"] = std::string(to_string(*c.solve.state));
  if (c.solve.eps) s["eps"] = *c.solve.eps;
  if (c.solve.alpha) s["alpha"] = *c.solve.alpha;
  j["solve"] = s;
  j["output"] = c.output;
  j["threads"] = c.threads;
  return j;
}

}  // namespace lpq
