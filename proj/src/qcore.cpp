// SPDX-License-Identifier: Apache-2.0

#include "qvqt/qcore.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "qvqt/hamiltonian.hpp"

namespace qvqt {

namespace {

constexpr std::size_t dim_of(int n_qubits) { return std::size_t{1} << n_qubits; }

void apply_single_qubit(Complex* amps, std::size_t dim, int target, Complex m00, Complex m01,
                        Complex m10, Complex m11) {
  const std::size_t bit = std::size_t{1} << target;
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & bit) continue;
    Complex a0 = amps[base];
    Complex a1 = amps[base | bit];
    amps[base] = m00 * a0 + m01 * a1;
    amps[base | bit] = m10 * a0 + m11 * a1;
  }
}

}  // namespace

void Circuit::validate() const {
  std::vector<int> seen(n_params, 0);
  for (const Gate& g : gates) {
    if (g.target < 0 || g.target >= n_qubits)
      throw std::invalid_argument("gate target out of range");
    if (g.kind == GateKind::CX) {
      if (g.control < 0 || g.control >= n_qubits)
        throw std::invalid_argument("CX control out of range");
      if (g.control == g.target) throw std::invalid_argument("CX control equals target");
      if (g.param_index != -1) throw std::invalid_argument("CX must not carry a parameter");
    } else {
      if (g.param_index < 0 || g.param_index >= n_params)
        throw std::invalid_argument("rotation parameter index out of range");
      ++seen[g.param_index];
    }
  }
  for (int count : seen)
    if (count != 1) throw std::invalid_argument("each parameter slot must be used exactly once");
}

Circuit Circuit::inverse() const {
  Circuit inv{n_qubits, {}, n_params};
  inv.gates.assign(gates.rbegin(), gates.rend());
  return inv;
}

double StateVector::norm_sq() const {
  double s = 0.0;
  for (const Complex& a : amplitudes) s += std::norm(a);
  return s;
}

double DensityMatrix::hermiticity_defect() const {
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

StateVector basis_state(int n_qubits, std::uint64_t index) {
  if (n_qubits < 1) throw std::invalid_argument("n_qubits must be >= 1");
  const std::size_t dim = dim_of(n_qubits);
  if (index >= dim) throw std::invalid_argument("basis index out of range");
  StateVector s{n_qubits, std::vector<Complex>(dim, Complex{0.0, 0.0})};
  s.amplitudes[index] = Complex{1.0, 0.0};
  return s;
}

void apply_gate(const Gate& gate, const std::vector<double>& params, Complex* amps,
                std::size_t dim) {
  switch (gate.kind) {
    case GateKind::RX: {
      const double h = 0.5 * params[gate.param_index];
      const double c = std::cos(h), s = std::sin(h);
      apply_single_qubit(amps, dim, gate.target, {c, 0}, {0, -s}, {0, -s}, {c, 0});
      break;
    }
    case GateKind::RY: {
      const double h = 0.5 * params[gate.param_index];
      const double c = std::cos(h), s = std::sin(h);
      apply_single_qubit(amps, dim, gate.target, {c, 0}, {-s, 0}, {s, 0}, {c, 0});
      break;
    }
    case GateKind::RZ: {
      const double h = 0.5 * params[gate.param_index];
      const Complex em{std::cos(h), -std::sin(h)};
      const Complex ep{std::cos(h), std::sin(h)};
      const std::size_t bit = std::size_t{1} << gate.target;
      for (std::size_t i = 0; i < dim; ++i) amps[i] *= (i & bit) ? ep : em;
      break;
    }
    case GateKind::CX: {
      const std::size_t cbit = std::size_t{1} << gate.control;
      const std::size_t tbit = std::size_t{1} << gate.target;
      for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cbit) && !(i & tbit)) std::swap(amps[i], amps[i | tbit]);
      }
      break;
    }
  }
}

StateVector apply_circuit(const Circuit& circuit, const std::vector<double>& params,
                          const StateVector& state) {
  if (static_cast<int>(params.size()) != circuit.n_params)
    throw std::invalid_argument("parameter count does not match circuit");
  if (state.n_qubits != circuit.n_qubits)
    throw std::invalid_argument("state and circuit qubit counts differ");
  StateVector out = state;
  for (const Gate& g : circuit.gates) apply_gate(g, params, out.amplitudes.data(), out.dim());
  return out;
}

void apply_circuit_to_matrix(const Circuit& circuit, const std::vector<double>& params,
                             Eigen::MatrixXcd& columns) {
  if (static_cast<int>(params.size()) != circuit.n_params)
    throw std::invalid_argument("parameter count does not match circuit");
  if (columns.rows() != static_cast<Eigen::Index>(dim_of(circuit.n_qubits)))
    throw std::invalid_argument("matrix row count does not match circuit dimension");
  const std::size_t dim = columns.rows();
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    Complex* col = columns.col(c).data();
    for (const Gate& g : circuit.gates) apply_gate(g, params, col, dim);
  }
}

ProbDist measure_probabilities(const StateVector& state) {
  ProbDist d{state.n_qubits, std::vector<double>(state.dim())};
  for (std::size_t i = 0; i < state.dim(); ++i) d.probs[i] = std::norm(state.amplitudes[i]);
  return d;
}

double expectation(const StateVector& state, const PauliSum& observable) {
  if (state.n_qubits != observable.n_qubits)
    throw std::invalid_argument("state and observable qubit counts differ");
  const std::size_t dim = state.dim();
  std::vector<Complex> hx(dim, Complex{0.0, 0.0});
  pauli_sum_apply(observable, state.amplitudes.data(), hx.data(), dim);
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < dim; ++i) acc += std::conj(state.amplitudes[i]) * hx[i];
  return acc.real();
}

std::vector<std::uint64_t> sample_counts(const ProbDist& dist, std::uint64_t shots,
                                         std::uint64_t seed) {
  if (shots == 0) throw std::invalid_argument("shots must be >= 1");
  std::vector<double> cdf(dist.probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    acc += dist.probs[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> counts(dist.probs.size(), 0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    // 53-bit uniform in [0, 1)
    const double u = std::ldexp(static_cast<double>(rng() >> 11), -53);
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    ++counts[static_cast<std::size_t>(it - cdf.begin())];
  }
  return counts;
}

DensityMatrix density_from_ensemble(const ProbDist& probs,
                                    const std::vector<StateVector>& states) {
  if (probs.probs.size() != states.size())
    throw std::invalid_argument("one state per probability required");
  const std::size_t dim = probs.probs.size();
  DensityMatrix rho{probs.n_qubits, Eigen::MatrixXcd::Zero(dim, dim)};
  for (std::size_t i = 0; i < dim; ++i) {
    if (probs.probs[i] == 0.0) continue;
    Eigen::Map<const Eigen::VectorXcd> v(states[i].amplitudes.data(), dim);
    rho.entries.noalias() += probs.probs[i] * v * v.adjoint();
  }
  return rho;
}

}  // namespace qvqt
