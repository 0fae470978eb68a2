// SPDX-License-Identifier: Apache-2.0
//
// Performance metrics against the exact Gibbs oracle, correlation functions,
// the weighted eigenstate-energy deviation, and the two measurement-error
// estimators with a Monte Carlo validator.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qvqt/hamiltonian.hpp"
#include "qvqt/qcore.hpp"

namespace qvqt {

struct MetricTriple {
  double delta_F = 0.0;       // computed minus exact free energy
  double infidelity = 0.0;    // f_m = 1 - f(rho, rho_Gibbs)
  double trace_distance = 0.0;
};

struct CorrelationResult {
  double c0 = 0.0;  // nearest-neighbor sigma^z sigma^z average
  double c1 = 0.0;  // next-nearest-neighbor average
};

struct ErrorModelInput {
  std::vector<double> sigmas;    // per-eigenstate single-shot standard deviations
  std::vector<double> probs;
  std::vector<double> energies;
  double beta = 0.0;
  std::uint64_t shots = 1;
  int n_qubits = 0;
};

// Uhlmann fidelity (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2 via Hermitian
// eigendecompositions; negative eigenvalues clamped at 0 before sqrt.
double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2);

double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2);

MetricTriple metric_triple(const DensityMatrix& model, const PauliSum& h, double beta);
MetricTriple metric_triple(const DensityMatrix& model, const EigenSystem& es,
                           const PauliSum& h, double beta);

CorrelationResult correlations(const DensityMatrix& rho, const LatticeSpec& lattice);

// Boltzmann-weighted mixture of per-eigenstate correlations at the requested
// beta, which may differ from the temperature the states were optimized at.
CorrelationResult correlations_from_spectrum(
    const std::vector<CorrelationResult>& per_state, const std::vector<double>& energies,
    double beta);

// Delta_k E = sum_{i<=k} p_i |e_i^exp - e_i^exact| / (n * sum_{i<=k} p_i),
// both spectra sorted ascending.
double delta_k_energy(const std::vector<double>& exp_energies,
                      const std::vector<double>& exact_energies,
                      const std::vector<double>& probs, std::size_t k, int n_qubits);

// Error of the thermal energy when every eigenvalue is measured with N/2^n shots.
double error_estimate_uniform(const ErrorModelInput& input);

// Error of the thermal energy when eigenstates are sampled with probability p_i.
double error_estimate_qvqt(const ErrorModelInput& input);
// Same with the subleading 1/N term dropped (leading 1/sqrt(N) order only).
double error_estimate_qvqt_leading(const ErrorModelInput& input);

// Per-eigenstate single-shot standard deviation of H, each Pauli term measured
// in its own shots: sigma_i^2 = sum_t c_t^2 (1 - <P_t>_i^2) over non-identity terms.
std::vector<double> eigenstate_sigmas(const PauliSum& h, const EigenSystem& es);

struct MonteCarloError {
  double empirical = 0.0;
  double predicted = 0.0;
};

// Repeats the sampled energy-estimation pipeline `trials` times and compares
// the empirical standard deviation of the estimator with error_estimate_qvqt.
MonteCarloError monte_carlo_energy_error(const PauliSum& h, double beta, std::uint64_t shots,
                                         int trials, std::uint64_t seed);

}  // namespace qvqt
