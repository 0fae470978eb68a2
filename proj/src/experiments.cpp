// SPDX-License-Identifier: Apache-2.0

#include "qvqt/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qvqt/metrics.hpp"

namespace qvqt {

namespace {

const std::vector<std::string> kExperimentIds = {
    "E1_depth_sweep",      "E2_beta_sweep",     "E3_iteration_scaling",
    "E4_alpha_sweep",      "E5_phase_diagram",  "E6_chain_scaling"};

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i)
    g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return g;
}

std::vector<double> linear_grid(double lo, double hi, int count) {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  return g;
}

std::vector<double> alpha_default(int count) {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = 2.0 * std::numbers::pi * i / count;
  return g;
}

QvqtConfig engine_config(const ExperimentConfig& c, double beta, std::uint64_t point_seed) {
  QvqtConfig q;
  q.beta = beta;
  q.prob_cutoff = c.prob_cutoff;
  q.grad_tolerance = c.grad_tolerance;
  q.max_iterations = c.max_iterations;
  q.n_starts = c.n_starts;
  q.master_seed = point_seed;
  return q;
}

// <psi| sigma^z_i sigma^z_j |psi> averaged over the lattice pair lists.
CorrelationResult state_zz_correlations(const StateVector& state, const LatticeSpec& lattice) {
  auto average = [&](const std::vector<std::pair<int, int>>& pairs) {
    double acc = 0.0;
    for (const auto& [i, j] : pairs) {
      const std::size_t mask = (std::size_t{1} << i) | (std::size_t{1} << j);
      double val = 0.0;
      for (std::size_t k = 0; k < state.dim(); ++k) {
        const int sign = (std::popcount(k & mask) & 1) ? -1 : 1;
        val += sign * std::norm(state.amplitudes[k]);
      }
      acc += val;
    }
    return acc / pairs.size();
  };
  return {average(lattice.nn_pairs), average(lattice.nnn_pairs)};
}

struct RunMetrics {
  MetricTriple triple;
  double free_energy;
  int iterations;
  bool converged;
  bool failed;
};

std::vector<RunMetrics> score_runs(const MultistartOutcome& outcome, const Circuit& vqc1,
                                   const Circuit& vqc2, const EigenSystem& es,
                                   const PauliSum& h, double beta) {
  std::vector<RunMetrics> metrics;
  metrics.reserve(outcome.runs.size());
  for (const QvqtResult& run : outcome.runs) {
    RunMetrics m;
    m.free_energy = run.free_energy;
    m.iterations = run.iterations;
    m.converged = run.converged;
    m.failed = run.failed;
    if (run.failed && !std::isfinite(run.free_energy)) {
      const double inf = std::numeric_limits<double>::infinity();
      m.triple = {inf, inf, inf};
    } else {
      m.triple = metric_triple(model_density(vqc1, vqc2, run.params), es, h, beta);
    }
    metrics.push_back(m);
  }
  return metrics;
}

nlohmann::json run_record(std::size_t index, const RunMetrics& m) {
  return {{"run", index},
          {"free_energy", m.free_energy},
          {"delta_F", m.triple.delta_F},
          {"f_m", m.triple.infidelity},
          {"trace_distance", m.triple.trace_distance},
          {"iterations", m.iterations},
          {"converged", m.converged},
          {"failed", m.failed}};
}

std::string join_formatted(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += format_double(values[i]);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig c;
  if (!j.contains("id") || !j.at("id").is_string())
    throw std::invalid_argument("config requires a string 'id'");
  c.id = j.at("id").get<std::string>();
  if (std::find(kExperimentIds.begin(), kExperimentIds.end(), c.id) == kExperimentIds.end())
    throw std::invalid_argument("unknown experiment id: " + c.id);

  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("J", c.J);
  get("Jx", c.Jx);
  get("Jz", c.Jz);
  get("n_qubits", c.n_qubits);
  get("beta_grid", c.beta_grid);
  get("alpha_grid", c.alpha_grid);
  get("temperature_grid", c.temperature_grid);
  get("param_grid", c.param_grid);
  get("depth_grid", c.depth_grid);
  get("chain_lengths", c.chain_lengths);
  get("prob_cutoff", c.prob_cutoff);
  get("grad_tolerance", c.grad_tolerance);
  get("max_iterations", c.max_iterations);
  get("n_starts", c.n_starts);
  get("master_seed", c.master_seed);
  get("output_path", c.output_path);

  // beta defaults to the experiment's reference temperature
  c.beta = (c.id == "E4_alpha_sweep" || c.id == "E5_phase_diagram") ? 1.0 : 1.3;
  get("beta", c.beta);

  if (c.param_grid.empty()) c.param_grid = {12, 20, 36, 52, 76};
  if (c.beta_grid.empty()) c.beta_grid = log_grid(0.1, 10.0, 13);
  if (c.alpha_grid.empty()) c.alpha_grid = alpha_default(24);
  if (c.temperature_grid.empty()) c.temperature_grid = linear_grid(0.2, 4.0, 20);
  if (c.depth_grid.empty()) c.depth_grid = {1, 2, 3, 4};
  if (c.chain_lengths.empty()) c.chain_lengths = {3, 4, 5, 6, 7};

  if (c.n_qubits < 1) throw std::invalid_argument("n_qubits must be >= 1");
  if (c.n_starts < 1) throw std::invalid_argument("n_starts must be >= 1");
  if (!(c.beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  for (double b : c.beta_grid)
    if (!(b > 0.0)) throw std::invalid_argument("beta grid entries must be > 0");
  for (double t : c.temperature_grid)
    if (!(t > 0.0)) throw std::invalid_argument("temperature grid entries must be > 0");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"id", c.id},
          {"J", c.J},
          {"Jx", c.Jx},
          {"Jz", c.Jz},
          {"n_qubits", c.n_qubits},
          {"beta", c.beta},
          {"beta_grid", c.beta_grid},
          {"alpha_grid", c.alpha_grid},
          {"temperature_grid", c.temperature_grid},
          {"param_grid", c.param_grid},
          {"depth_grid", c.depth_grid},
          {"chain_lengths", c.chain_lengths},
          {"prob_cutoff", c.prob_cutoff},
          {"grad_tolerance", c.grad_tolerance},
          {"max_iterations", c.max_iterations},
          {"n_starts", c.n_starts},
          {"master_seed", c.master_seed},
          {"output_path", c.output_path}};
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  const std::string s = to_json(config).dump();
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::pair<Circuit, Circuit> ansatz_for_total_params(int n_qubits, int total_params) {
  if (n_qubits == 4 && total_params == 76) return reference_ansatz(4);
  const Circuit vqc1 = build_minimal_entropy_circuit(n_qubits);
  const int remaining = total_params - vqc1.n_params;
  const int per_layer = 2 * n_qubits;  // {RY, RZ} rotation layer
  if (remaining < per_layer || remaining % per_layer != 0)
    throw std::invalid_argument("total parameter count " + std::to_string(total_params) +
                                " not representable at n = " + std::to_string(n_qubits));
  AnsatzSpec spec{n_qubits, remaining / per_layer - 1, {GateKind::RY, GateKind::RZ},
                  Entangler::Linear, true};
  return {vqc1, build_hardware_efficient(spec)};
}

std::vector<double> zero_crossings(const std::vector<double>& angles,
                                   const std::vector<double>& values, bool periodic) {
  if (angles.size() != values.size() || angles.size() < 2)
    throw std::invalid_argument("need matching angle/value vectors of length >= 2");
  std::vector<double> roots;
  const std::size_t n = angles.size();
  const std::size_t edges = periodic ? n : n - 1;
  for (std::size_t i = 0; i < edges; ++i) {
    const std::size_t j = (i + 1) % n;
    const double a0 = angles[i];
    const double a1 = (j == 0) ? angles[j] + 2.0 * std::numbers::pi : angles[j];
    const double v0 = values[i], v1 = values[j];
    if (v0 == 0.0) {
      roots.push_back(std::fmod(a0, 2.0 * std::numbers::pi));
    } else if (v0 * v1 < 0.0) {
      double a = a0 + (a1 - a0) * v0 / (v0 - v1);
      a = std::fmod(a, 2.0 * std::numbers::pi);
      roots.push_back(a);
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

ExperimentTable run_e1_depth_sweep(const ExperimentConfig& config, int threads) {
  const PauliSum h = heisenberg_chain(config.n_qubits, config.J, config.Jx, config.Jz);
  const EigenSystem es = exact_eigensystem(h);
  ExperimentTable table;
  table.columns = {"experiment", "n_params",       "statistic", "delta_F",
                   "f_m",        "trace_distance", "seed"};
  table.run_records = nlohmann::json::array();
  for (std::size_t point = 0; point < config.param_grid.size(); ++point) {
    const int total = config.param_grid[point];
    const auto [vqc1, vqc2] = ansatz_for_total_params(config.n_qubits, total);
    const std::uint64_t seed = derive_seed(config.master_seed, point);
    const MultistartOutcome outcome =
        multistart(vqc1, vqc2, h, engine_config(config, config.beta, seed), threads);
    const std::vector<RunMetrics> metrics =
        score_runs(outcome, vqc1, vqc2, es, h, config.beta);

    std::vector<double> dF, fm, td;
    nlohmann::json point_runs = nlohmann::json::array();
    for (std::size_t r = 0; r < metrics.size(); ++r) {
      dF.push_back(metrics[r].triple.delta_F);
      fm.push_back(metrics[r].triple.infidelity);
      td.push_back(metrics[r].triple.trace_distance);
      point_runs.push_back(run_record(r, metrics[r]));
    }
    const MultistartSummary s_dF = summarize(dF), s_fm = summarize(fm), s_td = summarize(td);
    auto emit = [&](const char* stat, double a, double b, double c) {
      table.rows.push_back({config.id, std::to_string(total), stat, format_double(a),
                            format_double(b), format_double(c), std::to_string(seed)});
    };
    emit("best", s_dF.best, s_fm.best, s_td.best);
    emit("p20", s_dF.p20, s_fm.p20, s_td.p20);
    emit("mean", s_dF.mean, s_fm.mean, s_td.mean);
    table.run_records.push_back({{"n_params", total}, {"seed", seed}, {"runs", point_runs}});
  }
  return table;
}

ExperimentTable run_e2_beta_sweep(const ExperimentConfig& config, int threads) {
  const PauliSum h = heisenberg_chain(config.n_qubits, config.J, config.Jx, config.Jz);
  const EigenSystem es = exact_eigensystem(h);
  const auto [vqc1, vqc2] = reference_ansatz(config.n_qubits);
  ExperimentTable table;
  table.columns = {"experiment", "beta",           "statistic", "delta_F",
                   "f_m",        "trace_distance", "seed"};
  table.run_records = nlohmann::json::array();
  for (std::size_t point = 0; point < config.beta_grid.size(); ++point) {
    const double beta = config.beta_grid[point];
    const std::uint64_t seed = derive_seed(config.master_seed, point);
    const MultistartOutcome outcome =
        multistart(vqc1, vqc2, h, engine_config(config, beta, seed), threads);
    const std::vector<RunMetrics> metrics = score_runs(outcome, vqc1, vqc2, es, h, beta);

    std::vector<double> dF, fm, td;
    nlohmann::json point_runs = nlohmann::json::array();
    for (std::size_t r = 0; r < metrics.size(); ++r) {
      dF.push_back(metrics[r].triple.delta_F);
      fm.push_back(metrics[r].triple.infidelity);
      td.push_back(metrics[r].triple.trace_distance);
      point_runs.push_back(run_record(r, metrics[r]));
    }
    const MultistartSummary s_dF = summarize(dF), s_fm = summarize(fm), s_td = summarize(td);
    auto emit = [&](const char* stat, double a, double b, double c) {
      table.rows.push_back({config.id, format_double(beta), stat, format_double(a),
                            format_double(b), format_double(c), std::to_string(seed)});
    };
    emit("best", s_dF.best, s_fm.best, s_td.best);
    emit("p20", s_dF.p20, s_fm.p20, s_td.p20);
    emit("mean", s_dF.mean, s_fm.mean, s_td.mean);
    table.run_records.push_back({{"beta", beta}, {"seed", seed}, {"runs", point_runs}});
  }
  return table;
}

ExperimentTable run_e3_iteration_scaling(const ExperimentConfig& config, int threads) {
  const PauliSum h = heisenberg_chain(config.n_qubits, config.J, config.Jx, config.Jz);
  ExperimentTable table;
  table.columns = {"experiment", "n_params", "mean_iterations", "circuit_evaluations", "seed"};
  table.run_records = nlohmann::json::array();
  std::vector<double> xs, ys;
  for (std::size_t point = 0; point < config.param_grid.size(); ++point) {
    const int total = config.param_grid[point];
    const auto [vqc1, vqc2] = ansatz_for_total_params(config.n_qubits, total);
    const std::uint64_t seed = derive_seed(config.master_seed, point);
    const MultistartOutcome outcome =
        multistart(vqc1, vqc2, h, engine_config(config, config.beta, seed), threads);
    double iter_sum = 0.0;
    nlohmann::json point_runs = nlohmann::json::array();
    for (std::size_t r = 0; r < outcome.runs.size(); ++r) {
      iter_sum += outcome.runs[r].iterations;
      point_runs.push_back({{"run", r},
                            {"iterations", outcome.runs[r].iterations},
                            {"converged", outcome.runs[r].converged},
                            {"free_energy", outcome.runs[r].free_energy}});
    }
    const double mean_iter = iter_sum / outcome.runs.size();
    // One iteration evaluates F and its gradient: 2 n_var + 1 circuits.
    const double circuit_evals = mean_iter * (2.0 * total + 1.0);
    table.rows.push_back({config.id, std::to_string(total), format_double(mean_iter),
                          format_double(circuit_evals), std::to_string(seed)});
    table.run_records.push_back({{"n_params", total}, {"seed", seed}, {"runs", point_runs}});
    xs.push_back(total);
    ys.push_back(mean_iter);
  }
  // Least-squares linear fit of mean iterations vs parameter count.
  if (xs.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    const double n = static_cast<double>(xs.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    double residual = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double d = ys[i] - (slope * xs[i] + intercept);
      residual += d * d;
    }
    table.run_records.push_back({{"linear_fit",
                                  {{"slope", slope},
                                   {"intercept", intercept},
                                   {"residual_sum_squares", residual}}}});
  }
  return table;
}

ExperimentTable run_e4_alpha_sweep(const ExperimentConfig& config, int threads) {
  const auto [vqc1, vqc2] = reference_ansatz(4);
  ExperimentTable table;
  table.columns = {"experiment", "alpha",    "c0_qvqt", "c1_qvqt", "c0_exact",
                   "c1_exact",   "delta_F_best", "seed"};
  table.run_records = nlohmann::json::array();
  for (std::size_t point = 0; point < config.alpha_grid.size(); ++point) {
    const double alpha = config.alpha_grid[point];
    const auto [h, lattice] = j1j2_lattice(alpha);
    const EigenSystem es = exact_eigensystem(h);
    const GibbsOracle oracle = gibbs_state(es, config.beta);
    const std::uint64_t seed = derive_seed(config.master_seed, point);
    const MultistartOutcome outcome =
        multistart(vqc1, vqc2, h, engine_config(config, config.beta, seed), threads);
    const QvqtResult& best = outcome.runs[outcome.best_index];
    const DensityMatrix model = model_density(vqc1, vqc2, best.params);
    const CorrelationResult c_model = correlations(model, lattice);
    const CorrelationResult c_exact = correlations(oracle.gibbs, lattice);
    const double dF_best = best.free_energy - oracle.free_energy;
    table.rows.push_back({config.id, format_double(alpha), format_double(c_model.c0),
                          format_double(c_model.c1), format_double(c_exact.c0),
                          format_double(c_exact.c1), format_double(dF_best),
                          std::to_string(seed)});
    table.run_records.push_back({{"alpha", alpha},
                                 {"seed", seed},
                                 {"best_run", outcome.best_index},
                                 {"best_free_energy", best.free_energy},
                                 {"exact_free_energy", oracle.free_energy},
                                 {"c0_qvqt", c_model.c0},
                                 {"c1_qvqt", c_model.c1},
                                 {"c0_exact", c_exact.c0},
                                 {"c1_exact", c_exact.c1}});
  }
  return table;
}

ExperimentTable run_e5_phase_diagram(const ExperimentConfig& config, int threads) {
  const auto [vqc1, vqc2] = reference_ansatz(4);
  ExperimentTable table;
  table.columns = {"experiment", "row_type",   "alpha",      "temperature", "c0_qvqt",
                   "c1_qvqt",    "c0_exact",   "c1_exact",   "delta_c",     "c0_cross_qvqt",
                   "c0_cross_exact", "c1_cross_qvqt", "c1_cross_exact", "seed"};
  table.run_records = nlohmann::json::array();

  struct PerAlpha {
    std::vector<CorrelationResult> model_corr, exact_corr;
    std::vector<double> model_energies, exact_energies;
  };
  std::vector<PerAlpha> spectra;
  std::vector<LatticeSpec> lattices;

  // One optimization per alpha at the base temperature; everything else is
  // classical reweighting of the extracted spectrum.
  for (std::size_t point = 0; point < config.alpha_grid.size(); ++point) {
    const double alpha = config.alpha_grid[point];
    const auto [h, lattice] = j1j2_lattice(alpha);
    const EigenSystem es = exact_eigensystem(h);
    const std::uint64_t seed = derive_seed(config.master_seed, point);
    const MultistartOutcome outcome =
        multistart(vqc1, vqc2, h, engine_config(config, config.beta, seed), threads);
    const QvqtResult& best = outcome.runs[outcome.best_index];
    const std::vector<ExtractedState> states =
        extract_eigenstates(vqc1, vqc2, h, best, best.retained_indices.size());

    PerAlpha pa;
    for (const ExtractedState& s : states) {
      pa.model_corr.push_back(state_zz_correlations(s.state, lattice));
      pa.model_energies.push_back(s.energy);
    }
    for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k) {
      StateVector v{4, std::vector<Complex>(es.eigenvectors.rows())};
      for (Eigen::Index i = 0; i < es.eigenvectors.rows(); ++i)
        v.amplitudes[i] = es.eigenvectors(i, k);
      pa.exact_corr.push_back(state_zz_correlations(v, lattice));
      pa.exact_energies.push_back(es.eigenvalues(k));
    }
    spectra.push_back(std::move(pa));
    lattices.push_back(lattice);
    table.run_records.push_back({{"alpha", alpha},
                                 {"seed", seed},
                                 {"best_run", outcome.best_index},
                                 {"best_free_energy", best.free_energy},
                                 {"n_extracted", states.size()}});
  }

  for (double t : config.temperature_grid) {
    const double beta_t = 1.0 / t;
    std::vector<double> c0_q, c1_q, c0_e, c1_e;
    for (std::size_t point = 0; point < config.alpha_grid.size(); ++point) {
      const PerAlpha& pa = spectra[point];
      const CorrelationResult cq =
          correlations_from_spectrum(pa.model_corr, pa.model_energies, beta_t);
      const CorrelationResult ce =
          correlations_from_spectrum(pa.exact_corr, pa.exact_energies, beta_t);
      const double delta_c = std::abs(ce.c0 - cq.c0) + std::abs(ce.c1 - cq.c1);
      c0_q.push_back(cq.c0);
      c1_q.push_back(cq.c1);
      c0_e.push_back(ce.c0);
      c1_e.push_back(ce.c1);
      table.rows.push_back({config.id, "point", format_double(config.alpha_grid[point]),
                            format_double(t), format_double(cq.c0), format_double(cq.c1),
                            format_double(ce.c0), format_double(ce.c1),
                            format_double(delta_c), "", "", "", "",
                            std::to_string(config.master_seed)});
    }
    table.rows.push_back(
        {config.id, "crossing", "", format_double(t), "", "", "", "", "",
         join_formatted(zero_crossings(config.alpha_grid, c0_q)),
         join_formatted(zero_crossings(config.alpha_grid, c0_e)),
         join_formatted(zero_crossings(config.alpha_grid, c1_q)),
         join_formatted(zero_crossings(config.alpha_grid, c1_e)),
         std::to_string(config.master_seed)});
  }
  return table;
}

ExperimentTable run_e6_chain_scaling(const ExperimentConfig& config, int threads) {
  ExperimentTable table;
  table.columns = {"experiment", "chain_length", "n_params", "statistic",
                   "delta0_E",   "delta1_E",     "seed"};
  table.run_records = nlohmann::json::array();
  std::size_t point = 0;
  for (int n : config.chain_lengths) {
    const PauliSum h = heisenberg_chain(n, config.J, config.Jx, config.Jz);
    const EigenSystem es = exact_eigensystem(h);
    std::vector<double> exact(es.eigenvalues.data(),
                              es.eigenvalues.data() + es.eigenvalues.size());
    for (int depth : config.depth_grid) {
      const Circuit vqc1 = build_single_rotation_circuit(n);
      const AnsatzSpec spec{n, depth, {GateKind::RY, GateKind::RZ}, Entangler::Linear, true};
      const Circuit vqc2 = build_hardware_efficient(spec);
      const int total = vqc1.n_params + vqc2.n_params;
      const std::uint64_t seed = derive_seed(config.master_seed, point++);
      const MultistartOutcome outcome =
          multistart(vqc1, vqc2, h, engine_config(config, config.beta, seed), threads);

      std::vector<double> d0s, d1s;
      nlohmann::json point_runs = nlohmann::json::array();
      for (std::size_t r = 0; r < outcome.runs.size(); ++r) {
        const QvqtResult& run = outcome.runs[r];
        double d0 = std::numeric_limits<double>::infinity();
        double d1 = std::numeric_limits<double>::infinity();
        if (!run.failed || std::isfinite(run.free_energy)) {
          const std::size_t avail = run.retained_indices.size();
          const std::vector<ExtractedState> states =
              extract_eigenstates(vqc1, vqc2, h, run, std::min<std::size_t>(avail, 2));
          std::vector<double> exp_e, probs;
          for (const ExtractedState& s : states) {
            exp_e.push_back(s.energy);
            probs.push_back(s.probability);
          }
          d0 = delta_k_energy(exp_e, exact, probs, 0, n);
          if (states.size() >= 2) d1 = delta_k_energy(exp_e, exact, probs, 1, n);
        }
        d0s.push_back(d0);
        d1s.push_back(d1);
        point_runs.push_back({{"run", r},
                              {"delta0_E", d0},
                              {"delta1_E", d1},
                              {"free_energy", run.free_energy},
                              {"iterations", run.iterations}});
      }
      const MultistartSummary s0 = summarize(d0s), s1 = summarize(d1s);
      auto emit = [&](const char* stat, double a, double b) {
        table.rows.push_back({config.id, std::to_string(n), std::to_string(total), stat,
                              format_double(a), format_double(b), std::to_string(seed)});
      };
      emit("best", s0.best, s1.best);
      emit("p20", s0.p20, s1.p20);
      table.run_records.push_back(
          {{"chain_length", n}, {"n_params", total}, {"seed", seed}, {"runs", point_runs}});
    }
  }
  return table;
}

ExperimentTable run_experiment(const ExperimentConfig& config, int threads) {
  if (config.id == "E1_depth_sweep") return run_e1_depth_sweep(config, threads);
  if (config.id == "E2_beta_sweep") return run_e2_beta_sweep(config, threads);
  if (config.id == "E3_iteration_scaling") return run_e3_iteration_scaling(config, threads);
  if (config.id == "E4_alpha_sweep") return run_e4_alpha_sweep(config, threads);
  if (config.id == "E5_phase_diagram") return run_e5_phase_diagram(config, threads);
  if (config.id == "E6_chain_scaling") return run_e6_chain_scaling(config, threads);
  throw std::invalid_argument("unknown experiment id: " + config.id);
}

void write_csv(const ExperimentTable& table, const ExperimentConfig& config,
               std::ostream& out) {
  char hash[20];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(config_hash(config)));
  out << "# qvqt-experiment v1\n";
  out << "# id: " << config.id << "\n";
  out << "# config_hash: " << hash << "\n";
  out << "# master_seed: " << config.master_seed << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << table.columns[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

void write_outputs(const ExperimentTable& table, const ExperimentConfig& config,
                   const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw std::runtime_error("cannot create output directory: " + directory);
  const fs::path csv_path = fs::path(directory) / (config.id + ".csv");
  const fs::path json_path = fs::path(directory) / (config.id + ".json");
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
  write_csv(table, config, csv);
  std::ofstream js(json_path);
  if (!js) throw std::runtime_error("cannot write " + json_path.string());
  js << nlohmann::json{{"config", to_json(config)}, {"runs", table.run_records}}.dump(2)
     << "\n";
}

}  // namespace qvqt
