// SPDX-License-Identifier: Apache-2.0
//
// Builders for the two variational circuits.

#pragma once

#include <utility>
#include <vector>

#include "qvqt/qcore.hpp"

namespace qvqt {

enum class Entangler { Linear, Circular };

struct AnsatzSpec {
  int n_qubits = 0;
  int depth = 0;  // number of [rotation layer, entangling layer] repetitions
  std::vector<GateKind> rotation_set;  // subset of {RX, RY, RZ}, applied in order
  Entangler entangler = Entangler::Linear;
  bool final_rotation_layer = true;
};

struct ParameterVector {
  std::vector<double> phi;    // VQC1
  std::vector<double> theta;  // VQC2

  std::vector<double> joined() const;
  static ParameterVector split(const std::vector<double>& joint, std::size_t n_phi);
};

// Parameter count: n_qubits * |rotation_set| * (depth + final_rotation_layer).
Circuit build_hardware_efficient(const AnsatzSpec& spec);

// One RX per qubit; the intermediate distribution becomes a product of
// per-qubit Bernoulli distributions.
Circuit build_minimal_entropy_circuit(int n_qubits);

// One RX on qubit 0; the intermediate distribution lives on basis states 0 and 1.
Circuit build_single_rotation_circuit(int n_qubits);

// VQC1 = depth-2 {RY} hardware-efficient, VQC2 = depth-7 {RY,RZ}, both with a
// final rotation layer and a linear CX entangler. 12 + 64 = 76 parameters at
// n = 4. The split between the two circuits and the gate choices are a
// reconstruction; only the depths and the total count are pinned externally.
std::pair<Circuit, Circuit> reference_ansatz(int n_qubits);

}  // namespace qvqt
