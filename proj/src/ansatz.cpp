// SPDX-License-Identifier: Apache-2.0

#include "qvqt/ansatz.hpp"

#include <stdexcept>

namespace qvqt {

std::vector<double> ParameterVector::joined() const {
  std::vector<double> out = phi;
  out.insert(out.end(), theta.begin(), theta.end());
  return out;
}

ParameterVector ParameterVector::split(const std::vector<double>& joint, std::size_t n_phi) {
  if (n_phi > joint.size()) throw std::invalid_argument("phi length exceeds joint vector");
  ParameterVector p;
  p.phi.assign(joint.begin(), joint.begin() + n_phi);
  p.theta.assign(joint.begin() + n_phi, joint.end());
  return p;
}

Circuit build_hardware_efficient(const AnsatzSpec& spec) {
  if (spec.n_qubits < 1) throw std::invalid_argument("n_qubits must be >= 1");
  if (spec.depth < 0) throw std::invalid_argument("depth must be >= 0");
  if (spec.rotation_set.empty()) throw std::invalid_argument("rotation_set must be nonempty");
  for (GateKind k : spec.rotation_set)
    if (k == GateKind::CX) throw std::invalid_argument("rotation_set must not contain CX");

  Circuit c{spec.n_qubits, {}, 0};
  int next_param = 0;
  auto rotation_layer = [&] {
    for (int q = 0; q < spec.n_qubits; ++q)
      for (GateKind k : spec.rotation_set) c.gates.push_back({k, q, -1, next_param++});
  };
  for (int rep = 0; rep < spec.depth; ++rep) {
    rotation_layer();
    for (int q = 0; q + 1 < spec.n_qubits; ++q) c.gates.push_back(Gate::cx(q, q + 1));
    if (spec.entangler == Entangler::Circular && spec.n_qubits > 2)
      c.gates.push_back(Gate::cx(spec.n_qubits - 1, 0));
  }
  if (spec.final_rotation_layer) rotation_layer();
  c.n_params = next_param;
  c.validate();
  return c;
}

Circuit build_minimal_entropy_circuit(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("n_qubits must be >= 1");
  Circuit c{n_qubits, {}, n_qubits};
  for (int q = 0; q < n_qubits; ++q) c.gates.push_back(Gate::rx(q, q));
  c.validate();
  return c;
}

Circuit build_single_rotation_circuit(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("n_qubits must be >= 1");
  Circuit c{n_qubits, {Gate::rx(0, 0)}, 1};
  c.validate();
  return c;
}

std::pair<Circuit, Circuit> reference_ansatz(int n_qubits) {
  AnsatzSpec entropy_spec{n_qubits, 2, {GateKind::RY}, Entangler::Linear, true};
  AnsatzSpec energy_spec{n_qubits, 7, {GateKind::RY, GateKind::RZ}, Entangler::Linear, true};
  return {build_hardware_efficient(entropy_spec), build_hardware_efficient(energy_spec)};
}

}  // namespace qvqt
