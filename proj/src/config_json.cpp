#include "lpq/config_json.hpp"

namespace lpq {

StateKind state_from_json(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError("expected a state name at " + where);
  const auto s = parse_state(j.get<std::string>());
  if (!s) throw ConfigError("unknown state '" + j.get<std::string>() + "' at " + where);
  return *s;
}

Json model_json(const FullOrderConfig& c) { return {{"c", c.c_pen}, {"q", c.q}}; }

Json solver_json(const FullOrderConfig& c) {
  Json j = {{"n_h", c.n_h},
            {"dt", c.solver.dt},
            {"max_steps", c.solver.max_steps},
            {"conv_tol", c.solver.conv_tol},
            {"dealias", c.solver.dealias},
            {"zero_mean", c.solver.zero_mean},
            {"amplitude", c.amplitude}};
  if (!c.seeds.empty()) {
    Json seeds = Json::object();
    for (const auto& [state, idx] : c.seeds) {
      Json list = Json::array();
      for (const auto& h : idx) list.push_back({h[0], h[1], h[2], h[3]});
      seeds[std::string(to_string(state))] = list;
    }
    j["seeds"] = seeds;
  }
  return j;
}

Json to_json(const FullOrderConfig& c) {
  return {{"model", model_json(c)}, {"solver", solver_json(c)}};
}

Json to_json(const GridSpec& g) { return {{"n_g", g.n_g}, {"L", g.box_multiplier}}; }

Json to_json(const Domain& d) {
  return {{"eps_min", d.eps_min}, {"eps_max", d.eps_max}, {"alpha_min", d.alpha_min},
          {"alpha_max", d.alpha_max}};
}

Json dataset_json(const DatasetConfig& d) {
  Json branches = Json::array();
  for (auto s : d.branches) branches.push_back(std::string(to_string(s)));
  return {{"n_per_branch", d.n_per_branch},
          {"r_t", d.r_t},
          {"seed", d.seed},
          {"branches", branches},
          {"threshold", d.reconstruct_threshold}};
}

void read_model(JsonObject o, FullOrderConfig& c) {
  o.get("c", c.c_pen);
  o.get("q", c.q);
  o.finish();
}

void read_solver(JsonObject o, FullOrderConfig& c) {
  o.get("n_h", c.n_h);
  o.get("dt", c.solver.dt);
  o.get("max_steps", c.solver.max_steps);
  o.get("conv_tol", c.solver.conv_tol);
  o.get("dealias", c.solver.dealias);
  o.get("zero_mean", c.solver.zero_mean);
  o.get("amplitude", c.amplitude);
  if (o.has("seeds")) {
    JsonObject seeds = o.child("seeds");
    c.seeds.clear();
    for (auto state : kOrderedStates) {
      const std::string name(to_string(state));
      std::vector<std::array<int, 4>> list;
      if (!seeds.get(name, list)) continue;
      c.seeds[state] = list;
    }
    seeds.finish();
  }
  o.finish();
}

void read_grid(JsonObject o, GridSpec& g) {
  o.get("n_g", g.n_g);
  o.get("L", g.box_multiplier);
  o.finish();
}

void read_domain(JsonObject o, Domain& d) {
  o.get("eps_min", d.eps_min);
  o.get("eps_max", d.eps_max);
  o.get("alpha_min", d.alpha_min);
  o.get("alpha_max", d.alpha_max);
  o.finish();
}

void read_dataset(JsonObject o, DatasetConfig& d) {
  o.get("n_per_branch", d.n_per_branch);
  o.get("r_t", d.r_t);
  o.get("seed", d.seed);
  o.get("threshold", d.reconstruct_threshold);
  o.get("batch", d.batch);
  if (o.has("branches")) {
    const Json& b = o.raw("branches");
    if (!b.is_array()) throw ConfigError("dataset.branches must be a list of state names");
    d.branches.clear();
    for (const auto& s : b) d.branches.push_back(state_from_json(s, o.key_path("branches")));
  }
  o.finish();
}

Json full_dataset_json(const DatasetConfig& d) {
  return {{"model", model_json(d.full_order)}, {"solver", solver_json(d.full_order)},
          {"grid", to_json(d.grid)},           {"domain", to_json(d.domain)},
          {"dataset", dataset_json(d)}};
}

DatasetConfig read_full_dataset(const Json& j) {
  DatasetConfig d;
  JsonObject o(j, "config");
  read_model(o.child("model"), d.full_order);
  read_solver(o.child("solver"), d.full_order);
  read_grid(o.child("grid"), d.grid);
  read_domain(o.child("domain"), d.domain);
  read_dataset(o.child("dataset"), d);
  o.finish();
  return d;
}

}  // namespace lpq
