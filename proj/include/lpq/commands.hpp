#pragma once

// CLI verbs. Each command reads its inputs from and writes its outputs under
// config.output, echoes the resolved config and writes <verb>_config.json.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "lpq/config.hpp"

namespace lpq::cli {

// Output layout relative to config.output.
namespace layout {
inline const char* const kDataset = "dataset";
inline const char* const kModels = "models";
inline const char* const kClassifier = "models/classifier.lpcl";
inline const char* const kSolve = "solve";
inline const char* const kPredict = "predict";
inline const char* const kNoise = "noise";
inline const char* const kBench = "bench.csv";
}  // namespace layout

void cmd_solve(const RunConfig& c, std::ostream& log);
void cmd_dataset(const RunConfig& c, std::ostream& log);
void cmd_train_ae(const RunConfig& c, std::ostream& log);
void cmd_train_classifier(const RunConfig& c, std::ostream& log);
void cmd_predict(const RunConfig& c, std::ostream& log);
void cmd_phase_diagram(const RunConfig& c, std::ostream& log);
void cmd_bench(const RunConfig& c, std::ostream& log);
void cmd_noise_study(const RunConfig& c, std::ostream& log);

const std::vector<std::string>& verbs();

// Echoes the config, then dispatches. Throws ConfigError on an unknown verb.
void run_command(const std::string& verb, const RunConfig& c, std::ostream& log);

}  // namespace lpq::cli
