// SPDX-License-Identifier: Apache-2.0

#include "qvqt/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace qvqt {

namespace {

Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  Eigen::VectorXd vals = solver.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) vals(i) = std::sqrt(std::max(vals(i), 0.0));
  return solver.eigenvectors() * vals.asDiagonal() * solver.eigenvectors().adjoint();
}

void check_dims(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.entries.rows() != b.entries.rows())
    throw std::invalid_argument("density matrix dimensions differ");
}

}  // namespace

double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  check_dims(rho1, rho2);
  const Eigen::MatrixXcd s1 = hermitian_sqrt(rho1.entries);
  const Eigen::MatrixXcd inner = s1 * rho2.entries * s1;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(inner);
  double tr = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
    tr += std::sqrt(std::max(solver.eigenvalues()(i), 0.0));
  return std::min(tr * tr, 1.0 + 1e-9);
}

double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  check_dims(rho1, rho2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho1.entries - rho2.entries);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

MetricTriple metric_triple(const DensityMatrix& model, const EigenSystem& es,
                           const PauliSum& h, double beta) {
  const GibbsOracle oracle = gibbs_state(es, beta);
  // Model free energy from the density matrix itself: Tr(H rho) - S_vN / beta.
  const std::size_t dim = model.entries.rows();
  Eigen::MatrixXcd hrho = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<Complex> col(dim), out(dim, Complex{0, 0});
    for (std::size_t i = 0; i < dim; ++i) col[i] = model.entries(i, j);
    pauli_sum_apply(h, col.data(), out.data(), dim);
    for (std::size_t i = 0; i < dim; ++i) hrho(i, j) = out[i];
  }
  const double energy = hrho.trace().real();
  const double model_free_energy = energy - von_neumann_entropy(model) / beta;
  MetricTriple t;
  t.delta_F = model_free_energy - oracle.free_energy;
  t.infidelity = 1.0 - fidelity(model, oracle.gibbs);
  t.trace_distance = trace_distance(model, oracle.gibbs);
  return t;
}

MetricTriple metric_triple(const DensityMatrix& model, const PauliSum& h, double beta) {
  return metric_triple(model, exact_eigensystem(h), h, beta);
}

CorrelationResult correlations(const DensityMatrix& rho, const LatticeSpec& lattice) {
  if (lattice.nn_pairs.empty() || lattice.nnn_pairs.empty())
    throw std::invalid_argument("lattice pair lists must be nonempty");
  const std::size_t dim = rho.entries.rows();
  auto zz_average = [&](const std::vector<std::pair<int, int>>& pairs) {
    double acc = 0.0;
    for (const auto& [i, j] : pairs) {
      const std::size_t mask = (std::size_t{1} << i) | (std::size_t{1} << j);
      double val = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const int sign = (std::popcount(k & mask) & 1) ? -1 : 1;
        val += sign * rho.entries(k, k).real();
      }
      acc += val;
    }
    return acc / pairs.size();
  };
  return {zz_average(lattice.nn_pairs), zz_average(lattice.nnn_pairs)};
}

CorrelationResult correlations_from_spectrum(
    const std::vector<CorrelationResult>& per_state, const std::vector<double>& energies,
    double beta) {
  if (per_state.size() != energies.size())
    throw std::invalid_argument("correlation and energy counts differ");
  if (per_state.empty()) throw std::invalid_argument("empty spectrum");
  const double e0 = *std::min_element(energies.begin(), energies.end());
  double z = 0.0;
  CorrelationResult out{0.0, 0.0};
  for (std::size_t i = 0; i < per_state.size(); ++i) {
    const double w = std::exp(-beta * (energies[i] - e0));
    z += w;
    out.c0 += w * per_state[i].c0;
    out.c1 += w * per_state[i].c1;
  }
  out.c0 /= z;
  out.c1 /= z;
  return out;
}

double delta_k_energy(const std::vector<double>& exp_energies,
                      const std::vector<double>& exact_energies,
                      const std::vector<double>& probs, std::size_t k, int n_qubits) {
  if (exp_energies.size() != probs.size())
    throw std::invalid_argument("energy and probability counts differ");
  if (k >= exp_energies.size() || k >= exact_energies.size())
    throw std::invalid_argument("k out of range");
  double num = 0.0, mass = 0.0;
  for (std::size_t i = 0; i <= k; ++i) {
    num += probs[i] * std::abs(exp_energies[i] - exact_energies[i]);
    mass += probs[i];
  }
  if (mass <= 0.0) throw std::invalid_argument("zero retained probability mass");
  return num / (n_qubits * mass);
}

double error_estimate_uniform(const ErrorModelInput& input) {
  const double scale = std::pow(2.0, input.n_qubits);
  double acc = 0.0;
  for (std::size_t i = 0; i < input.sigmas.size(); ++i) {
    const double factor = 1.0 - input.beta * input.energies[i] * (1.0 - input.probs[i]);
    acc += input.sigmas[i] * input.sigmas[i] * input.probs[i] * input.probs[i] * factor * factor;
  }
  return std::sqrt(scale * acc / static_cast<double>(input.shots));
}

double error_estimate_qvqt(const ErrorModelInput& input) {
  const double n = static_cast<double>(input.shots);
  double acc = 0.0;
  for (std::size_t i = 0; i < input.sigmas.size(); ++i) {
    acc += input.sigmas[i] * input.sigmas[i] * input.probs[i] +
           input.probs[i] * (1.0 - input.probs[i]) * input.energies[i] * input.energies[i] / n;
  }
  return std::sqrt(acc / n);
}

double error_estimate_qvqt_leading(const ErrorModelInput& input) {
  double acc = 0.0;
  for (std::size_t i = 0; i < input.sigmas.size(); ++i)
    acc += input.sigmas[i] * input.sigmas[i] * input.probs[i];
  return std::sqrt(acc / static_cast<double>(input.shots));
}

std::vector<double> eigenstate_sigmas(const PauliSum& h, const EigenSystem& es) {
  const std::size_t dim = es.eigenvectors.rows();
  std::vector<double> sigmas(es.eigenvectors.cols());
  std::vector<Complex> col(dim), out(dim);
  for (Eigen::Index k = 0; k < es.eigenvectors.cols(); ++k) {
    double var = 0.0;
    for (const PauliTerm& t : h.terms) {
      if (t.letters.find_first_not_of('I') == std::string::npos) continue;
      for (std::size_t i = 0; i < dim; ++i) col[i] = es.eigenvectors(i, k);
      std::fill(out.begin(), out.end(), Complex{0, 0});
      PauliTerm unit{1.0, t.letters};
      pauli_term_apply(unit, col.data(), out.data(), dim);
      Complex mean{0, 0};
      for (std::size_t i = 0; i < dim; ++i) mean += std::conj(col[i]) * out[i];
      // P^2 = I for a non-identity Pauli string, so Var = 1 - <P>^2 per shot.
      var += t.coefficient * t.coefficient * (1.0 - mean.real() * mean.real());
    }
    sigmas[k] = std::sqrt(std::max(var, 0.0));
  }
  return sigmas;
}

MonteCarloError monte_carlo_energy_error(const PauliSum& h, double beta, std::uint64_t shots,
                                         int trials, std::uint64_t seed) {
  if (h.n_qubits > 4) throw std::invalid_argument("Monte Carlo validator limited to 4 qubits");
  if (trials < 100) throw std::invalid_argument("at least 100 trials required");
  const EigenSystem es = exact_eigensystem(h);
  const GibbsOracle oracle = gibbs_state(es, beta);
  const std::vector<double> sigmas = eigenstate_sigmas(h, es);

  ErrorModelInput input;
  input.sigmas = sigmas;
  input.probs.assign(oracle.probabilities.data(),
                     oracle.probabilities.data() + oracle.probabilities.size());
  input.energies.assign(es.eigenvalues.data(), es.eigenvalues.data() + es.eigenvalues.size());
  input.beta = beta;
  input.shots = shots;
  input.n_qubits = h.n_qubits;

  ProbDist dist{h.n_qubits, input.probs};
  std::vector<double> estimates(trials);
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = seed + 0x9E3779B97F4A7C15ULL * (t + 1);
    const std::vector<std::uint64_t> counts = sample_counts(dist, shots, trial_seed);
    std::mt19937_64 rng(trial_seed ^ 0xD1B54A32D192ED03ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double estimate = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] == 0) continue;
      const double m = static_cast<double>(counts[i]);
      const double measured =
          input.energies[i] + gauss(rng) * sigmas[i] / std::sqrt(m);
      estimate += (m / static_cast<double>(shots)) * measured;
    }
    estimates[t] = estimate;
  }
  const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / trials;
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= (trials - 1);
  return {std::sqrt(var), error_estimate_qvqt(input)};
}

}  // namespace qvqt
