// SPDX-License-Identifier: Apache-2.0
//
// Declarative experiment runner: six numerical experiments over the two spin
// models, deterministic seeding, CSV + JSON output.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qvqt/engine.hpp"

namespace qvqt {

struct ExperimentConfig {
  std::string id;  // E1_depth_sweep .. E6_chain_scaling

  // chain model (E1, E2, E3, E6)
  double J = -1.0;
  double Jx = 0.3;
  double Jz = 0.2;
  int n_qubits = 4;

  double beta = 1.3;
  std::vector<double> beta_grid;      // E2
  std::vector<double> alpha_grid;     // E4, E5
  std::vector<double> temperature_grid;  // E5
  std::vector<int> param_grid;        // E1, E3: total variational parameter counts
  std::vector<int> depth_grid;        // E6: VQC2 depths per chain length
  std::vector<int> chain_lengths;     // E6

  double prob_cutoff = 1e-12;
  double grad_tolerance = 1e-3;
  int max_iterations = 1000;
  int n_starts = 100;
  std::uint64_t master_seed = 1;

  std::string output_path;  // directory for CSV/JSON; empty = in-memory only
};

// Missing grid fields are filled with the documented per-experiment defaults.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& config);

struct ExperimentTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // preformatted, deterministic
  nlohmann::json run_records;                  // full per-run data
};

// Deterministic double formatting used for every CSV cell.
std::string format_double(double v);

std::uint64_t config_hash(const ExperimentConfig& config);

ExperimentTable run_e1_depth_sweep(const ExperimentConfig& config, int threads = 1);
ExperimentTable run_e2_beta_sweep(const ExperimentConfig& config, int threads = 1);
ExperimentTable run_e3_iteration_scaling(const ExperimentConfig& config, int threads = 1);
ExperimentTable run_e4_alpha_sweep(const ExperimentConfig& config, int threads = 1);
ExperimentTable run_e5_phase_diagram(const ExperimentConfig& config, int threads = 1);
ExperimentTable run_e6_chain_scaling(const ExperimentConfig& config, int threads = 1);

// Dispatch on config.id.
ExperimentTable run_experiment(const ExperimentConfig& config, int threads = 1);

// CSV: '#'-prefixed metadata lines (config hash, master seed, version), then a
// header line and the data rows. Data rows are byte-stable across reruns.
void write_csv(const ExperimentTable& table, const ExperimentConfig& config,
               std::ostream& out);
void write_outputs(const ExperimentTable& table, const ExperimentConfig& config,
                   const std::string& directory);

// Ansatz used by the chain sweeps for a requested total parameter count:
// minimal-entropy VQC1 plus a {RY,RZ} hardware-efficient VQC2, except that the
// count 76 at n = 4 selects the reference ansatz pair.
std::pair<Circuit, Circuit> ansatz_for_total_params(int n_qubits, int total_params);

// Zero crossings of a periodic curve sampled on an ascending angle grid,
// located by linear interpolation (wraps around the last-to-first edge).
std::vector<double> zero_crossings(const std::vector<double>& angles,
                                   const std::vector<double>& values, bool periodic = true);

}  // namespace qvqt
