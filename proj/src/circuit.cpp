#include "frqinet/circuit.hpp"

#include <algorithm>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace frqinet {

Circuit::Circuit(int num_qubits, int num_param_slots)
    : num_qubits_(num_qubits), num_param_slots_(num_param_slots) {
  if (num_qubits < 0 || num_param_slots < 0) {
    throw std::invalid_argument("Circuit: negative size");
  }
}

Circuit& Circuit::append(Gate gate) {
  if (gate.parameterized()) num_param_slots_ = std::max(num_param_slots_, gate.slot + 1);
  validate_gate(gate, num_qubits_, static_cast<std::size_t>(num_param_slots_));
  ops_.push_back(std::move(gate));
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.num_qubits_ != num_qubits_) throw std::invalid_argument("Circuit: qubit-count mismatch");
  ops_.insert(ops_.end(), other.ops_.begin(), other.ops_.end());
  num_param_slots_ = std::max(num_param_slots_, other.num_param_slots_);
  return *this;
}

void Circuit::reserve_slots(int n) { num_param_slots_ = std::max(num_param_slots_, n); }

Circuit compose(const Circuit& a, const Circuit& b) {
  if (a.num_qubits() != b.num_qubits()) {
    throw std::invalid_argument("compose: qubit-count mismatch");
  }
  Circuit out(a.num_qubits(), a.num_param_slots() + b.num_param_slots());
  for (const auto& g : a.ops()) out.append(g);
  for (auto g : b.ops()) {
    if (g.parameterized()) g.slot += a.num_param_slots();
    out.append(std::move(g));
  }
  return out;
}

namespace {

// A single-qubit rotation family closed under square roots: the recursion
// needs V with V^2 = U and V^dagger.
struct Rotation {
  enum Kind { Phase, Ry } kind;
  double angle;

  Rotation half() const { return {kind, angle / 2}; }
  Rotation inverse() const { return {kind, -angle}; }
  Gate controlled(int control, int target) const {
    return kind == Phase ? gates::cphase(control, target, angle)
                         : gates::cry(control, target, angle);
  }
};

void emit_mcx(Circuit& c, std::span<const int> controls, int target);

// C^k(U) = C(V)[c_k] . C^{k-1}X[c_k] . C(V^dagger)[c_k] . C^{k-1}X[c_k] . C^{k-1}(V)
void emit_mc_rotation(Circuit& c, std::span<const int> controls, int target, Rotation u) {
  if (controls.size() == 1) {
    c.append(u.controlled(controls[0], target));
    return;
  }
  const int last = controls.back();
  const auto rest = controls.first(controls.size() - 1);
  const Rotation v = u.half();
  c.append(v.controlled(last, target));
  emit_mcx(c, rest, last);
  c.append(v.inverse().controlled(last, target));
  emit_mcx(c, rest, last);
  emit_mc_rotation(c, rest, target, v);
}

// X = H Z H and Z = Phase(pi); the phase chain has exact roots, so no
// relative-phase corrections are needed.
void emit_mcx(Circuit& c, std::span<const int> controls, int target) {
  if (controls.size() == 1) {
    c.append(gates::cnot(controls[0], target));
    return;
  }
  c.append(gates::h(target));
  emit_mc_rotation(c, controls, target, {Rotation::Phase, std::numbers::pi});
  c.append(gates::h(target));
}

void check_wires(std::span<const int> controls, int target, int num_qubits) {
  std::vector<int> all(controls.begin(), controls.end());
  all.push_back(target);
  for (int q : all) {
    if (q < 0 || q >= num_qubits) throw InvalidGate("decompose: qubit index out of range");
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw InvalidGate("decompose: control and target wires overlap");
  }
}

}  // namespace

Circuit decompose_mcx(std::span<const int> controls, int target, int num_qubits) {
  if (controls.empty()) throw InvalidGate("decompose_mcx: needs at least one control");
  check_wires(controls, target, num_qubits);
  Circuit c(num_qubits);
  emit_mcx(c, controls, target);
  return c;
}

Circuit decompose_mcx(std::span<const int> controls, int target) {
  int m = target + 1;
  for (int q : controls) m = std::max(m, q + 1);
  return decompose_mcx(controls, target, m);
}

Circuit decompose_mc_ry(std::span<const int> controls, int target, double angle, int num_qubits) {
  check_wires(controls, target, num_qubits);
  Circuit c(num_qubits);
  if (controls.empty()) {
    c.append(gates::ry(target, angle));
  } else {
    emit_mc_rotation(c, controls, target, {Rotation::Ry, angle});
  }
  return c;
}

int count_controlled_gates(const Circuit& c) {
  return static_cast<int>(std::count_if(c.ops().begin(), c.ops().end(),
                                        [](const Gate& g) { return g.controls.size() == 1; }));
}

void simulate_inplace(const Circuit& c, Statevector& state, std::span<const double> params) {
  if (state.num_qubits() != c.num_qubits()) {
    throw std::invalid_argument("simulate: register size mismatch");
  }
  if (params.size() < static_cast<std::size_t>(c.num_param_slots())) {
    throw std::invalid_argument("simulate: parameter vector too short");
  }
  for (const auto& g : c.ops()) {
    const double theta = g.parameterized() ? params[static_cast<std::size_t>(g.slot)] : 0.0;
    apply_gate_unchecked(state, g, theta);
  }
}

Statevector simulate(const Circuit& c, std::span<const double> params) {
  Statevector s(c.num_qubits());
  simulate_inplace(c, s, params);
  return s;
}

Eigen::MatrixXcd dense_circuit_unitary(const Circuit& c, std::span<const double> params) {
  const auto dim = Eigen::Index{1} << c.num_qubits();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& g : c.ops()) {
    Eigen::MatrixXcd next = dense_unitary(g, c.num_qubits(), params) * u;
    u = std::move(next);
  }
  return u;
}

namespace {

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<int> split_ints(std::string_view s) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto next = s.find(',', pos);
    const auto tok = s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    if (tok.empty()) throw std::invalid_argument("parse_circuit: empty index");
    out.push_back(std::stoi(std::string(tok)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

GateKind kind_from_name(std::string_view name) {
  for (auto k : {GateKind::H, GateKind::X, GateKind::Ry, GateKind::CNOT, GateKind::ControlledRy,
                 GateKind::ControlledPhase, GateKind::MultiControlledX, GateKind::ExpXX,
                 GateKind::ExpZZ}) {
    if (gate_name(k) == name) return k;
  }
  throw std::invalid_argument("parse_circuit: unknown gate " + std::string(name));
}

bool has_angle(GateKind k) {
  return k == GateKind::Ry || k == GateKind::ControlledRy || k == GateKind::ControlledPhase;
}

}  // namespace

std::string circuit_to_text(const Circuit& c) {
  std::ostringstream os;
  os << "qubits=" << c.num_qubits() << " slots=" << c.num_param_slots() << '\n';
  char buf[40];
  for (const auto& g : c.ops()) {
    os << gate_name(g.kind) << ' ' << join(g.targets);
    if (!g.controls.empty()) os << " [" << join(g.controls) << ']';
    if (g.parameterized()) {
      os << " slot=" << g.slot;
    } else if (has_angle(g.kind)) {
      std::snprintf(buf, sizeof buf, "%.17g", g.angle);
      os << " angle=" << buf;
    }
    os << '\n';
  }
  return os.str();
}

Circuit parse_circuit(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("parse_circuit: empty input");
  int m = 0, slots = 0;
  if (std::sscanf(line.c_str(), "qubits=%d slots=%d", &m, &slots) != 2) {
    throw std::invalid_argument("parse_circuit: bad header");
  }
  Circuit c(m, slots);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string name, targets, tok;
    ls >> name >> targets;
    Gate g;
    g.kind = kind_from_name(name);
    g.targets = split_ints(targets);
    while (ls >> tok) {
      if (tok.front() == '[' && tok.back() == ']') {
        g.controls = split_ints(std::string_view(tok).substr(1, tok.size() - 2));
      } else if (tok.rfind("slot=", 0) == 0) {
        g.slot = std::stoi(tok.substr(5));
      } else if (tok.rfind("angle=", 0) == 0) {
        g.angle = std::stod(tok.substr(6));
      } else {
        throw std::invalid_argument("parse_circuit: unexpected token " + tok);
      }
    }
    c.append(std::move(g));
  }
  return c;
}

}  // namespace frqinet
