// SPDX-License-Identifier: Apache-2.0
//
// Pauli-sum Hamiltonians for the two spin models, dense diagonalization and
// the exact Gibbs-state / free-energy oracle.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qvqt/qcore.hpp"

namespace qvqt {

struct PauliTerm {
  double coefficient = 0.0;
  std::string letters;  // letters[q] in {I,X,Y,Z}, q = qubit index (LSB first)
};

struct PauliSum {
  int n_qubits = 0;
  std::vector<PauliTerm> terms;

  // Merges into an existing term with the same letter pattern if present.
  void add(double coefficient, const std::string& letters);
  void add_single(double coefficient, int qubit, char letter);
  void add_two(double coefficient, int qubit_a, int qubit_b, char letter);
};

struct LatticeSpec {
  int n_sites = 0;
  std::vector<std::pair<int, int>> nn_pairs;
  std::vector<std::pair<int, int>> nnn_pairs;
};

struct EigenSystem {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXcd eigenvectors; // orthonormal columns
};

struct GibbsOracle {
  double beta = 0.0;
  double partition_function = 0.0;  // unshifted convention
  Eigen::VectorXd probabilities;    // Boltzmann weights, descending with energy
  DensityMatrix gibbs;
  double free_energy = 0.0;
};

// H = J * (XX + YY + ZZ) on each chain bond + Jx * X + Jz * Z on every site.
// Open boundary by default; `periodic` closes the loop.
PauliSum heisenberg_chain(int n, double J, double Jx, double Jz, bool periodic = false);

// 2x2 plaquette with open boundaries, J1 = sin(alpha) on the 4 edges and
// J2 = cos(alpha) on the 2 diagonals; each bond carries XX + YY + ZZ.
std::pair<PauliSum, LatticeSpec> j1j2_lattice(double alpha);

// y = y + coeff * P x for a single Pauli string (phases and bit flips only).
void pauli_term_apply(const PauliTerm& term, const Complex* x, Complex* y, std::size_t dim);

// y = H x
void pauli_sum_apply(const PauliSum& h, const Complex* x, Complex* y, std::size_t dim);

Eigen::MatrixXcd to_dense(const PauliSum& h);

EigenSystem exact_eigensystem(const PauliSum& h);

GibbsOracle gibbs_state(const EigenSystem& es, double beta);

double exact_free_energy(const EigenSystem& es, double beta);

// von Neumann entropy in nats, eigenvalues clamped at 0.
double von_neumann_entropy(const DensityMatrix& rho);

}  // namespace qvqt
