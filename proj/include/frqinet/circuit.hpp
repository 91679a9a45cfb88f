#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "frqinet/statevector.hpp"

namespace frqinet {

/// Ordered gate list on a fixed register. Gates sharing a slot index share
/// one trainable parameter.
class Circuit {
 public:
  explicit Circuit(int num_qubits = 0, int num_param_slots = 0);

  /// Validates qubit indices; grows num_param_slots to cover the gate's slot.
  Circuit& append(Gate gate);
  Circuit& append(const Circuit& other);  // same register, slots kept as-is

  void reserve_slots(int n);

  int num_qubits() const { return num_qubits_; }
  int num_param_slots() const { return num_param_slots_; }
  const std::vector<Gate>& ops() const { return ops_; }
  std::size_t size() const { return ops_.size(); }
  bool empty() const { return ops_.empty(); }

  bool operator==(const Circuit&) const = default;

 private:
  int num_qubits_;
  int num_param_slots_;
  std::vector<Gate> ops_;
};

/// Concatenation; the slots of `b` are re-based after those of `a`.
Circuit compose(const Circuit& a, const Circuit& b);

/// Multi-controlled X expanded into CNOT, controlled-phase and Hadamard gates
/// by the Barenco recursion. No ancillas. For k controls the result holds
/// 2*3^(k-1) - 1 one-control gates.
Circuit decompose_mcx(std::span<const int> controls, int target, int num_qubits);
Circuit decompose_mcx(std::span<const int> controls, int target);

/// Multi-controlled Ry(angle) expanded the same way; with no controls this
/// is a single Ry.
Circuit decompose_mc_ry(std::span<const int> controls, int target, double angle, int num_qubits);

/// Number of gates with exactly one control.
int count_controlled_gates(const Circuit& c);

/// Runs the circuit on `state` in place.
void simulate_inplace(const Circuit& c, Statevector& state, std::span<const double> params = {});

/// Runs the circuit on |0...0>.
Statevector simulate(const Circuit& c, std::span<const double> params = {});

/// Product of dense_unitary over all gates (m <= 6). Test oracle.
Eigen::MatrixXcd dense_circuit_unitary(const Circuit& c, std::span<const double> params = {});

/// Text form: a header `qubits=M slots=S`, then one gate per line as
/// `NAME targets [controls] [slot=N | angle=X]`, e.g. `CRY 4 [1] angle=0.5`.
std::string circuit_to_text(const Circuit& c);
Circuit parse_circuit(std::string_view text);

}  // namespace frqinet
