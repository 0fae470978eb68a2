// SPDX-License-Identifier: Apache-2.0
//
// Dense statevector simulation of parameterized quantum circuits.
//
// Conventions used throughout:
//  - qubit 0 is the least-significant bit of the basis-state index
//  - rotation gates are R_A(theta) = exp(-i * theta * A / 2), A in {X, Y, Z}

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace qvqt {

using Complex = std::complex<double>;

enum class GateKind { RX, RY, RZ, CX };

struct Gate {
  GateKind kind;
  int target = 0;
  int control = -1;    // CX only
  int param_index = -1;  // rotations only

  static Gate rx(int target, int param_index) { return {GateKind::RX, target, -1, param_index}; }
  static Gate ry(int target, int param_index) { return {GateKind::RY, target, -1, param_index}; }
  static Gate rz(int target, int param_index) { return {GateKind::RZ, target, -1, param_index}; }
  static Gate cx(int control, int target) { return {GateKind::CX, target, control, -1}; }
};

struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;
  int n_params = 0;

  // Throws std::invalid_argument if a param_index in [0, n_params) is
  // missing, repeated, or a gate references an out-of-range qubit.
  void validate() const;

  // Reversed gate order; applying it with negated angles undoes this circuit.
  Circuit inverse() const;
};

struct StateVector {
  int n_qubits = 0;
  std::vector<Complex> amplitudes;

  std::size_t dim() const { return amplitudes.size(); }
  double norm_sq() const;
};

struct ProbDist {
  int n_qubits = 0;
  std::vector<double> probs;
};

struct DensityMatrix {
  int n_qubits = 0;
  Eigen::MatrixXcd entries;

  // max |M - M^dagger| elementwise
  double hermiticity_defect() const;
  double trace_real() const { return entries.trace().real(); }
};

// |b_index> on n_qubits qubits.
StateVector basis_state(int n_qubits, std::uint64_t index);

// In-place single-gate application on a 2^n vector of column-stride 1.
void apply_gate(const Gate& gate, const std::vector<double>& params,
                Complex* amps, std::size_t dim);

StateVector apply_circuit(const Circuit& circuit, const std::vector<double>& params,
                          const StateVector& state);

// Applies the circuit to every column of a dim x k matrix. Used to propagate
// several basis states through the same unitary in one pass.
void apply_circuit_to_matrix(const Circuit& circuit, const std::vector<double>& params,
                             Eigen::MatrixXcd& columns);

ProbDist measure_probabilities(const StateVector& state);

// Forward declaration; defined in hamiltonian.hpp.
struct PauliSum;

// <state| O |state> for a Hermitian Pauli-sum observable.
double expectation(const StateVector& state, const PauliSum& observable);

// Multinomial sampling by CDF inversion over a private mt19937_64 stream;
// identical seed -> identical counts.
std::vector<std::uint64_t> sample_counts(const ProbDist& dist, std::uint64_t shots,
                                         std::uint64_t seed);

// rho = sum_i p_i |states_i><states_i|
DensityMatrix density_from_ensemble(const ProbDist& probs,
                                    const std::vector<StateVector>& states);

}  // namespace qvqt
