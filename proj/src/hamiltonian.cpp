// SPDX-License-Identifier: Apache-2.0

#include "qvqt/hamiltonian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace qvqt {

namespace {

constexpr int kMaxDenseQubits = 12;

void check_letters(const std::string& letters) {
  for (char c : letters)
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
      throw std::invalid_argument("Pauli letters must be one of I, X, Y, Z");
}

}  // namespace

void PauliSum::add(double coefficient, const std::string& letters) {
  if (static_cast<int>(letters.size()) != n_qubits)
    throw std::invalid_argument("Pauli string length must equal n_qubits");
  check_letters(letters);
  if (!std::isfinite(coefficient)) throw std::invalid_argument("coefficient must be finite");
  for (PauliTerm& t : terms) {
    if (t.letters == letters) {
      t.coefficient += coefficient;
      return;
    }
  }
  terms.push_back({coefficient, letters});
}

void PauliSum::add_single(double coefficient, int qubit, char letter) {
  std::string s(n_qubits, 'I');
  s[qubit] = letter;
  add(coefficient, s);
}

void PauliSum::add_two(double coefficient, int qubit_a, int qubit_b, char letter) {
  std::string s(n_qubits, 'I');
  s[qubit_a] = letter;
  s[qubit_b] = letter;
  add(coefficient, s);
}

PauliSum heisenberg_chain(int n, double J, double Jx, double Jz, bool periodic) {
  if (n < 2) throw std::invalid_argument("chain needs at least 2 sites");
  PauliSum h{n, {}};
  const int bonds = periodic ? n : n - 1;
  for (int b = 0; b < bonds; ++b) {
    const int i = b;
    const int j = (b + 1) % n;
    for (char letter : {'X', 'Y', 'Z'}) h.add_two(J, i, j, letter);
  }
  for (int i = 0; i < n; ++i) {
    if (Jx != 0.0) h.add_single(Jx, i, 'X');
    if (Jz != 0.0) h.add_single(Jz, i, 'Z');
  }
  return h;
}

std::pair<PauliSum, LatticeSpec> j1j2_lattice(double alpha) {
  // Open 2x2 plaquette: sites 0 1 / 2 3, edges are nn, diagonals nnn.
  LatticeSpec lattice{4, {{0, 1}, {2, 3}, {0, 2}, {1, 3}}, {{0, 3}, {1, 2}}};
  const double j1 = std::sin(alpha);
  const double j2 = std::cos(alpha);
  PauliSum h{4, {}};
  for (const auto& [i, j] : lattice.nn_pairs)
    for (char letter : {'X', 'Y', 'Z'}) h.add_two(j1, i, j, letter);
  for (const auto& [i, j] : lattice.nnn_pairs)
    for (char letter : {'X', 'Y', 'Z'}) h.add_two(j2, i, j, letter);
  return {h, lattice};
}

void pauli_term_apply(const PauliTerm& term, const Complex* x, Complex* y, std::size_t dim) {
  // P|i> = phase(i) |i ^ flip_mask>; X and Y flip the bit, Y and Z carry phases.
  std::size_t flip_mask = 0;
  std::size_t z_mask = 0;  // bits whose value multiplies the phase by -1
  std::size_t y_mask = 0;
  for (std::size_t q = 0; q < term.letters.size(); ++q) {
    const std::size_t bit = std::size_t{1} << q;
    switch (term.letters[q]) {
      case 'X': flip_mask |= bit; break;
      case 'Y': flip_mask |= bit; y_mask |= bit; z_mask |= bit; break;
      case 'Z': z_mask |= bit; break;
      default: break;
    }
  }
  const int n_y = static_cast<int>(std::popcount(y_mask));
  // Y = i * X * Z in this decomposition: each Y contributes a factor i up front.
  static const Complex i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Complex y_factor = i_pow[n_y & 3];
  for (std::size_t i = 0; i < dim; ++i) {
    const int sign = (std::popcount(i & z_mask) & 1) ? -1 : 1;
    y[i ^ flip_mask] += term.coefficient * static_cast<double>(sign) * y_factor * x[i];
  }
}

void pauli_sum_apply(const PauliSum& h, const Complex* x, Complex* y, std::size_t dim) {
  for (const PauliTerm& t : h.terms) pauli_term_apply(t, x, y, dim);
}

Eigen::MatrixXcd to_dense(const PauliSum& h) {
  if (h.n_qubits > kMaxDenseQubits)
    throw std::length_error("dense assembly limited to 12 qubits");
  const std::size_t dim = std::size_t{1} << h.n_qubits;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  std::vector<Complex> col(dim), out(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    std::fill(col.begin(), col.end(), Complex{0, 0});
    std::fill(out.begin(), out.end(), Complex{0, 0});
    col[j] = Complex{1, 0};
    pauli_sum_apply(h, col.data(), out.data(), dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, j) = out[i];
  }
  return m;
}

EigenSystem exact_eigensystem(const PauliSum& h) {
  const Eigen::MatrixXcd m = to_dense(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

GibbsOracle gibbs_state(const EigenSystem& es, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  const Eigen::Index dim = es.eigenvalues.size();
  const double e0 = es.eigenvalues(0);
  Eigen::VectorXd weights(dim);
  for (Eigen::Index i = 0; i < dim; ++i) weights(i) = std::exp(-beta * (es.eigenvalues(i) - e0));
  const double shifted_z = weights.sum();
  const Eigen::VectorXd p = weights / shifted_z;
  GibbsOracle oracle;
  oracle.beta = beta;
  oracle.partition_function = shifted_z * std::exp(-beta * e0);
  oracle.probabilities = p;
  oracle.free_energy = e0 - std::log(shifted_z) / beta;
  int n_qubits = 0;
  while ((Eigen::Index{1} << n_qubits) < dim) ++n_qubits;
  oracle.gibbs.n_qubits = n_qubits;
  oracle.gibbs.entries =
      es.eigenvectors * p.asDiagonal() * es.eigenvectors.adjoint();
  return oracle;
}

double exact_free_energy(const EigenSystem& es, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  const double e0 = es.eigenvalues(0);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues.size(); ++i)
    acc += std::exp(-beta * (es.eigenvalues(i) - e0));
  return e0 - std::log(acc) / beta;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.entries);
  double s = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double lambda = solver.eigenvalues()(i);
    if (lambda > 0.0) s -= lambda * std::log(lambda);
  }
  return s;
}

}  // namespace qvqt
