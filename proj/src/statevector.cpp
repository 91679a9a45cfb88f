#include "frqinet/statevector.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace frqinet {

std::string_view gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::Ry: return "RY";
    case GateKind::CNOT: return "CNOT";
    case GateKind::ControlledRy: return "CRY";
    case GateKind::ControlledPhase: return "CPHASE";
    case GateKind::MultiControlledX: return "MCX";
    case GateKind::ExpXX: return "XX";
    case GateKind::ExpZZ: return "ZZ";
  }
  return "?";
}

namespace gates {
Gate h(int q) { return {GateKind::H, {q}, {}, 0.0, -1}; }
Gate x(int q) { return {GateKind::X, {q}, {}, 0.0, -1}; }
Gate ry(int q, double angle) { return {GateKind::Ry, {q}, {}, angle, -1}; }
Gate cnot(int control, int target) { return {GateKind::CNOT, {target}, {control}, 0.0, -1}; }
Gate cry(int control, int target, double angle) {
  return {GateKind::ControlledRy, {target}, {control}, angle, -1};
}
Gate cphase(int control, int target, double angle) {
  return {GateKind::ControlledPhase, {target}, {control}, angle, -1};
}
Gate mcx(std::vector<int> controls, int target) {
  return {GateKind::MultiControlledX, {target}, std::move(controls), 0.0, -1};
}
Gate exp_xx(int a, int b, int slot) { return {GateKind::ExpXX, {a, b}, {}, 0.0, slot}; }
Gate exp_zz(int a, int b, int slot) { return {GateKind::ExpZZ, {a, b}, {}, 0.0, slot}; }
}  // namespace gates

namespace {

std::size_t expected_targets(GateKind k) {
  return (k == GateKind::ExpXX || k == GateKind::ExpZZ) ? 2 : 1;
}

std::size_t expected_controls(GateKind k) {
  switch (k) {
    case GateKind::CNOT:
    case GateKind::ControlledRy:
    case GateKind::ControlledPhase:
      return 1;
    default:
      return 0;
  }
}

}  // namespace

void validate_gate(const Gate& gate, int num_qubits, std::size_t num_slots) {
  const auto name = std::string(gate_name(gate.kind));
  if (gate.targets.size() != expected_targets(gate.kind)) {
    throw InvalidGate(name + ": wrong number of targets");
  }
  if (gate.kind == GateKind::MultiControlledX) {
    if (gate.controls.empty()) throw InvalidGate("MCX needs at least one control");
  } else if (gate.controls.size() != expected_controls(gate.kind)) {
    throw InvalidGate(name + ": wrong number of controls");
  }
  std::vector<int> all(gate.targets);
  all.insert(all.end(), gate.controls.begin(), gate.controls.end());
  for (int q : all) {
    if (q < 0 || q >= num_qubits) throw InvalidGate(name + ": qubit index out of range");
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw InvalidGate(name + ": repeated qubit index");
  }
  const bool needs_slot = gate.kind == GateKind::ExpXX || gate.kind == GateKind::ExpZZ;
  if (needs_slot && (gate.slot < 0 || static_cast<std::size_t>(gate.slot) >= num_slots)) {
    throw InvalidGate(name + ": parameter slot out of range");
  }
}

std::uint64_t control_mask(const Statevector& s, std::span<const int> controls) {
  std::uint64_t m = 0;
  for (int c : controls) m |= s.mask(c);
  return m;
}

namespace {

using C = std::complex<double>;

void apply_impl(Statevector& s, const Gate& g, double theta, double sign) {
  const int t = g.targets[0];
  switch (g.kind) {
    case GateKind::H: {
      const double r = 1.0 / std::sqrt(2.0);
      kernels::apply_2x2(s, t, 0, C(r), C(r), C(r), C(-r));
      break;
    }
    case GateKind::X:
      kernels::apply_x(s, t, 0);
      break;
    case GateKind::CNOT:
    case GateKind::MultiControlledX:
      kernels::apply_x(s, t, control_mask(s, g.controls));
      break;
    case GateKind::Ry:
    case GateKind::ControlledRy: {
      const double c = std::cos(sign * g.angle / 2), sn = std::sin(sign * g.angle / 2);
      kernels::apply_2x2(s, t, control_mask(s, g.controls), C(c), C(-sn), C(sn), C(c));
      break;
    }
    case GateKind::ControlledPhase:
      kernels::apply_phase(s, control_mask(s, g.controls) | s.mask(t), sign * g.angle);
      break;
    case GateKind::ExpXX:
      kernels::apply_exp_xx(s, g.targets[0], g.targets[1], sign * theta);
      break;
    case GateKind::ExpZZ:
      kernels::apply_exp_zz(s, g.targets[0], g.targets[1], sign * theta);
      break;
  }
}

double slot_value(const Gate& g, std::span<const double> params) {
  if (!g.parameterized()) return 0.0;
  if (static_cast<std::size_t>(g.slot) >= params.size()) {
    throw InvalidGate(std::string(gate_name(g.kind)) + ": parameter slot out of range");
  }
  return params[static_cast<std::size_t>(g.slot)];
}

}  // namespace

void apply_gate_inplace(Statevector& state, const Gate& gate, std::span<const double> params) {
  validate_gate(gate, state.num_qubits(), gate.parameterized() ? params.size() : 0);
  apply_impl(state, gate, slot_value(gate, params), 1.0);
}

void apply_gate_inplace_with_theta(Statevector& state, const Gate& gate, double theta) {
  validate_gate(gate, state.num_qubits(), gate.parameterized() ? gate.slot + 1 : 0);
  apply_impl(state, gate, theta, 1.0);
}

void apply_gate_unchecked(Statevector& state, const Gate& gate, double theta, bool adjoint) {
  apply_impl(state, gate, theta, adjoint ? -1.0 : 1.0);
}

void apply_gate_adjoint_inplace(Statevector& state, const Gate& gate,
                                std::span<const double> params) {
  validate_gate(gate, state.num_qubits(), gate.parameterized() ? params.size() : 0);
  // H, X, CNOT and MCX are self-inverse; everything else negates its angle.
  apply_impl(state, gate, slot_value(gate, params), -1.0);
}

double expectation_z(const Statevector& state, int qubit) {
  if (qubit < 0 || qubit >= state.num_qubits()) {
    throw std::out_of_range("expectation_z: qubit index out of range");
  }
  const std::uint64_t m = state.mask(qubit);
  const auto& a = state.amplitudes();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double p = std::norm(a(i));
    acc += (static_cast<std::uint64_t>(i) & m) ? -p : p;
  }
  return acc;
}

namespace {

// Embeds the single-qubit matrix u on `target`, active where every control
// bit of the column index is set.
Eigen::MatrixXcd embed_controlled(const Eigen::Matrix2cd& u, int target,
                                  const std::vector<int>& controls, int m) {
  const std::uint64_t dim = std::uint64_t{1} << m;
  auto bit = [m](int q) { return std::uint64_t{1} << (m - 1 - q); };
  std::uint64_t cmask = 0;
  for (int c : controls) cmask |= bit(c);
  const std::uint64_t tmask = bit(target);

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim));
  for (std::uint64_t r = 0; r < dim; ++r) {
    for (std::uint64_t c = 0; c < dim; ++c) {
      if (((r ^ c) & ~tmask) != 0) continue;
      C v;
      if ((c & cmask) == cmask) {
        v = u((r & tmask) ? 1 : 0, (c & tmask) ? 1 : 0);
      } else {
        v = (r == c) ? C(1) : C(0);
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return out;
}

Eigen::MatrixXcd pauli_string(const Eigen::Matrix2cd& p, int qa, int qb, int m) {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(1, 1);
  for (int q = 0; q < m; ++q) {
    const Eigen::Matrix2cd f = (q == qa || q == qb) ? p : Eigen::Matrix2cd::Identity();
    Eigen::MatrixXcd next = Eigen::kroneckerProduct(acc, f).eval();
    acc = std::move(next);
  }
  return acc;
}

}  // namespace

Eigen::MatrixXcd dense_unitary(const Gate& gate, int num_qubits, std::span<const double> params) {
  if (num_qubits > 6) throw std::invalid_argument("dense_unitary: at most 6 qubits");
  validate_gate(gate, num_qubits, gate.parameterized() ? params.size() : 0);

  Eigen::Matrix2cd u;
  const double s2 = 1.0 / std::sqrt(2.0);
  switch (gate.kind) {
    case GateKind::H:
      u << s2, s2, s2, -s2;
      return embed_controlled(u, gate.targets[0], {}, num_qubits);
    case GateKind::X:
    case GateKind::CNOT:
    case GateKind::MultiControlledX:
      u << 0, 1, 1, 0;
      return embed_controlled(u, gate.targets[0], gate.controls, num_qubits);
    case GateKind::Ry:
    case GateKind::ControlledRy: {
      const double c = std::cos(gate.angle / 2), s = std::sin(gate.angle / 2);
      u << c, -s, s, c;
      return embed_controlled(u, gate.targets[0], gate.controls, num_qubits);
    }
    case GateKind::ControlledPhase:
      u << 1, 0, 0, std::polar(1.0, gate.angle);
      return embed_controlled(u, gate.targets[0], gate.controls, num_qubits);
    case GateKind::ExpXX:
    case GateKind::ExpZZ: {
      Eigen::Matrix2cd p;
      if (gate.kind == GateKind::ExpXX) {
        p << 0, 1, 1, 0;
      } else {
        p << 1, 0, 0, -1;
      }
      const double theta = params[static_cast<std::size_t>(gate.slot)];
      const Eigen::MatrixXcd h = pauli_string(p, gate.targets[0], gate.targets[1], num_qubits);
      const Eigen::MatrixXcd gen = C(0, -EIGEN_PI / 2 * theta) * h;
      return gen.exp();
    }
  }
  throw InvalidGate("dense_unitary: unknown gate");
}

namespace {
std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

void write_state_dump(std::ostream& os, const Statevector& state) {
  const int m = state.num_qubits();
  for (Eigen::Index i = 0; i < state.dim(); ++i) {
    std::string bits(static_cast<std::size_t>(m), '0');
    for (int q = 0; q < m; ++q) {
      if (static_cast<std::uint64_t>(i) & state.mask(q)) bits[static_cast<std::size_t>(q)] = '1';
    }
    os << bits << '\t' << fmt17(state[i].real()) << '\t' << fmt17(state[i].imag()) << '\n';
  }
}

std::string state_dump(const Statevector& state) {
  std::ostringstream os;
  write_state_dump(os, state);
  return os.str();
}

Statevector append_plus_qubit(const Statevector& state) {
  const double r = 1.0 / std::sqrt(2.0);
  Statevector::Amplitudes out(state.dim() * 2);
  for (Eigen::Index i = 0; i < state.dim(); ++i) {
    out(2 * i) = state[i] * r;
    out(2 * i + 1) = state[i] * r;
  }
  return Statevector(std::move(out));
}

}  // namespace frqinet
