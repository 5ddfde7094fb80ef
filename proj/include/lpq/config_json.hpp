#pragma once

// JSON (de)serialization of the solver-side configuration blocks. Readers
// start from the current value, overwrite only keys that are present and
// reject unknown keys.

#include "lpq/json_util.hpp"
#include "lpq/sweep.hpp"

namespace lpq {

Json to_json(const FullOrderConfig& c);  // "model" and "solver" keys merged
Json solver_json(const FullOrderConfig& c);
Json model_json(const FullOrderConfig& c);
Json to_json(const GridSpec& g);
Json to_json(const Domain& d);
// Dataset block only; the batch size is an execution detail and is omitted.
Json dataset_json(const DatasetConfig& d);

void read_solver(JsonObject obj, FullOrderConfig& c);
void read_model(JsonObject obj, FullOrderConfig& c);
void read_grid(JsonObject obj, GridSpec& g);
void read_domain(JsonObject obj, Domain& d);
void read_dataset(JsonObject obj, DatasetConfig& d);

// Whole dataset configuration: {model, solver, grid, domain, dataset}.
Json full_dataset_json(const DatasetConfig& d);
DatasetConfig read_full_dataset(const Json& j);

StateKind state_from_json(const Json& j, const std::string& where);

}  // namespace lpq
