#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "lpq/commands.hpp"
#include "lpq/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lifshitz-Petrich phase solver, graph autoencoder surrogate and phase classifier"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed, "seed for every stochastic stage");
  app.add_option("--out", out, "output directory");
  app.add_option("--threads", threads, "OpenMP threads (0: default)");
  for (const auto& verb : lpq::cli::verbs()) app.add_subcommand(verb);
  CLI11_PARSE(app, argc, argv);

  try {
    lpq::RunConfig c = config_path.empty() ? lpq::parse_run_config("{}") : lpq::load_run_config(config_path);
    if (seed) c.set_seed(*seed);
    if (out) c.output = *out;
    if (threads) c.threads = *threads;
    c.validate();
    if (c.threads > 0) omp_set_num_threads(c.threads);
    lpq::cli::run_command(app.get_subcommands().front()->get_name(), c, std::cout);
  } catch (const lpq::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
