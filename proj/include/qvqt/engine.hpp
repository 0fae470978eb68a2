// SPDX-License-Identifier: Apache-2.0
//
// The qVQT engine: mixed-state model built from two circuits with an
// intermediate measurement, free-energy evaluation, parameter-shift
// gradients, and bounded quasi-Newton optimization with multistart.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qvqt/ansatz.hpp"
#include "qvqt/hamiltonian.hpp"
#include "qvqt/lbfgsb.hpp"
#include "qvqt/qcore.hpp"

namespace qvqt {

struct QvqtConfig {
  double beta = 1.0;
  double prob_cutoff = 1e-12;  // basis states below this are skipped in the energy
  double grad_tolerance = 1e-3;
  int max_iterations = 1000;
  int n_starts = 100;
  std::uint64_t master_seed = 1;
  std::uint64_t shots = 0;  // 0 = exact intermediate distribution
  // Invoked on every objective evaluation; used to audit the variational bound.
  std::function<void(double)> eval_observer;
};

struct QvqtResult {
  ParameterVector params;
  ProbDist probabilities;
  std::vector<double> state_energies;  // for retained basis states, by basis index order
  std::vector<std::uint64_t> retained_indices;
  double energy = 0.0;
  double entropy = 0.0;
  double free_energy = 0.0;
  int iterations = 0;
  bool converged = false;
  bool failed = false;
  std::vector<std::pair<double, double>> history;  // (F, grad max-norm)
};

struct MultistartSummary {
  double best = 0.0;
  double p20 = 0.0;
  double mean = 0.0;
};

// Shannon entropy in nats, 0*ln(0) = 0.
double entropy(const ProbDist& dist);

// Sum over contiguous qubit blocks of the entropy of the block's marginal.
// Equals entropy(dist) exactly when the blocks are independent, otherwise
// overestimates it.
double subsystem_entropy(const ProbDist& dist, int subsystem_size);

// |amplitudes|^2 after VQC1, or empirical frequencies when shots > 0.
ProbDist intermediate_distribution(const Circuit& vqc1, const std::vector<double>& phi);
ProbDist intermediate_distribution_sampled(const Circuit& vqc1, const std::vector<double>& phi,
                                           std::uint64_t shots, std::uint64_t seed);

struct ModelEnergy {
  double energy = 0.0;                 // renormalized over retained mass
  std::vector<double> state_energies;  // per retained basis state
  std::vector<std::uint64_t> retained_indices;
};

// E = sum_{p_i > cutoff} p_i <b_i| U2^dag H U2 |b_i> / retained mass.
ModelEnergy model_energy(const Circuit& vqc2, const std::vector<double>& theta,
                         const ProbDist& dist, const PauliSum& h, double cutoff);

// U2 diag(p) U2^dag; eigenvalues equal the intermediate distribution.
DensityMatrix model_density(const Circuit& vqc1, const Circuit& vqc2,
                            const ParameterVector& params);

double free_energy(const Circuit& vqc1, const Circuit& vqc2, const ParameterVector& params,
                   const PauliSum& h, const QvqtConfig& config);

// dF/d(phi, theta) via the parameter-shift rule (shift pi/2 on each angle):
// theta entries differentiate the per-state energies, phi entries differentiate
// the probability vector and chain through both E and S.
std::vector<double> gradient(const Circuit& vqc1, const Circuit& vqc2,
                             const ParameterVector& params, const PauliSum& h,
                             const QvqtConfig& config);

QvqtResult optimize(const Circuit& vqc1, const Circuit& vqc2, const PauliSum& h,
                    const QvqtConfig& config, const ParameterVector& initial);

struct MultistartOutcome {
  std::vector<QvqtResult> runs;   // one per start, in seed order
  std::size_t best_index = 0;     // lowest final F among non-failed runs
  MultistartSummary free_energy_summary;
};

// Per-run seeds derive deterministically from config.master_seed; initial
// angles are uniform in [-pi, pi]. Failed runs keep their slot and rank as
// worst case in the statistics.
MultistartOutcome multistart(const Circuit& vqc1, const Circuit& vqc2, const PauliSum& h,
                             const QvqtConfig& config, int threads = 1);

// best / 20th percentile (nearest-rank) / mean of a metric vector.
MultistartSummary summarize(std::vector<double> values);

struct ExtractedState {
  double probability = 0.0;
  double energy = 0.0;
  StateVector state;
};

// The k highest-probability basis states mapped through VQC2, sorted by
// energy ascending.
std::vector<ExtractedState> extract_eigenstates(const Circuit& vqc1, const Circuit& vqc2,
                                                const PauliSum& h, const QvqtResult& result,
                                                std::size_t k);

// Deterministic per-run seed stream.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);
std::vector<double> random_angles(std::size_t count, std::uint64_t seed);

}  // namespace qvqt
