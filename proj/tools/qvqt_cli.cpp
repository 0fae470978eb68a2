// SPDX-License-Identifier: Apache-2.0
//
// Experiment CLI:
//   qvqt run --config <path> [--seed <u64>] [--out <dir>] [--threads <k>]
//   qvqt validate --config <path>

#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qvqt/experiments.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericalFailure = 3;
constexpr int kExitIoError = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qVQT experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;

  CLI::App* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("--config", config_path, "Path to the JSON config")->required();
  run->add_option("--seed", seed, "Override the master seed")->each([&](const std::string&) {
    seed_set = true;
  });
  run->add_option("--out", out_dir, "Output directory (overrides config/env)");
  run->add_option("--threads", threads, "Worker threads for multistart runs")
      ->check(CLI::PositiveNumber);

  CLI::App* validate = app.add_subcommand("validate", "Parse and check a config file");
  validate->add_option("--config", config_path, "Path to the JSON config")->required();

  CLI11_PARSE(app, argc, argv);

  qvqt::ExperimentConfig config;
  try {
    config = qvqt::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  if (validate->parsed()) {
    std::cout << "config ok: " << config.id << "\n";
    return 0;
  }

  if (seed_set) config.master_seed = seed;
  std::string directory = out_dir;
  if (directory.empty()) directory = config.output_path;
  if (directory.empty()) {
    if (const char* env = std::getenv("QVQT_OUT_DIR")) directory = env;
  }
  if (directory.empty()) directory = ".";

  qvqt::ExperimentTable table;
  try {
    table = qvqt::run_experiment(config, threads);
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  }

  try {
    qvqt::write_outputs(table, config, directory);
  } catch (const std::exception& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIoError;
  }
  std::cout << config.id << ": " << table.rows.size() << " rows -> " << directory << "\n";
  return 0;
}
