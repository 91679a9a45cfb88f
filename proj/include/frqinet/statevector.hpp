#pragma once

// Dense statevector simulation.
//
// Qubit 0 is the most significant bit of a basis index: for an m-qubit
// register, qubit q addresses bit (m - 1 - q). Every module uses this order.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace frqinet {

class InvalidGate : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class GateKind {
  H,
  X,
  Ry,               // exp(-i angle/2 Y)
  CNOT,
  ControlledRy,
  ControlledPhase,  // diag(1, 1, 1, e^{i angle}) on (control, target)
  MultiControlledX,
  ExpXX,            // exp(-i (pi/2) theta X(x)X), theta read from a param slot
  ExpZZ,            // exp(-i (pi/2) theta Z(x)Z)
};

std::string_view gate_name(GateKind kind);

struct Gate {
  GateKind kind = GateKind::H;
  std::vector<int> targets;   // one entry, or two for ExpXX / ExpZZ
  std::vector<int> controls;  // empty for uncontrolled gates
  double angle = 0.0;         // Ry, ControlledRy, ControlledPhase
  int slot = -1;              // ExpXX, ExpZZ

  bool parameterized() const { return slot >= 0; }
  bool operator==(const Gate&) const = default;
};

namespace gates {
Gate h(int q);
Gate x(int q);
Gate ry(int q, double angle);
Gate cnot(int control, int target);
Gate cry(int control, int target, double angle);
Gate cphase(int control, int target, double angle);
Gate mcx(std::vector<int> controls, int target);
Gate exp_xx(int a, int b, int slot);
Gate exp_zz(int a, int b, int slot);
}  // namespace gates

/// Throws InvalidGate when an index is out of range, repeated, or the
/// slot does not exist in a parameter vector of size `num_slots`.
void validate_gate(const Gate& gate, int num_qubits, std::size_t num_slots);

template <typename Scalar>
class BasicStatevector {
 public:
  using Complex = std::complex<Scalar>;
  using Amplitudes = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  BasicStatevector() = default;

  /// |0...0> on `num_qubits` qubits.
  explicit BasicStatevector(int num_qubits)
      : num_qubits_(checked_qubits(num_qubits)),
        amps_(Amplitudes::Zero(Eigen::Index{1} << num_qubits)) {
    amps_(0) = Complex(1);
  }

  /// Takes amplitudes as given; no normalization is applied.
  explicit BasicStatevector(Amplitudes amps) : amps_(std::move(amps)) {
    const auto n = static_cast<std::uint64_t>(amps_.size());
    if (n == 0 || (n & (n - 1)) != 0) {
      throw std::invalid_argument("statevector length must be a power of two");
    }
    while ((std::uint64_t{1} << num_qubits_) < n) ++num_qubits_;
  }

  static BasicStatevector basis(int num_qubits, std::uint64_t index) {
    BasicStatevector s(num_qubits);
    s.amps_(0) = Complex(0);
    s.amps_(static_cast<Eigen::Index>(index)) = Complex(1);
    return s;
  }

  int num_qubits() const { return num_qubits_; }
  Eigen::Index dim() const { return amps_.size(); }
  const Amplitudes& amplitudes() const { return amps_; }
  Amplitudes& amplitudes() { return amps_; }
  Complex operator[](Eigen::Index i) const { return amps_(i); }
  Complex& operator[](Eigen::Index i) { return amps_(i); }

  Scalar norm() const { return amps_.norm(); }

  /// Bit mask of qubit q in a basis index.
  std::uint64_t mask(int q) const { return std::uint64_t{1} << (num_qubits_ - 1 - q); }

 private:
  static int checked_qubits(int m) {
    if (m < 0 || m > 30) throw std::invalid_argument("unsupported qubit count");
    return m;
  }

  int num_qubits_ = 0;
  Amplitudes amps_;
};

using Statevector = BasicStatevector<double>;

// ---------------------------------------------------------------------------
// Kernels. All of them visit each amplitude O(1) times via bit masks and
// mutate the state in place.

namespace kernels {

/// Applies the 2x2 matrix [[u00, u01], [u10, u11]] to the target qubit on
/// the subspace where every bit in `control_mask` is set.
template <typename Scalar>
void apply_2x2(BasicStatevector<Scalar>& s, int target, std::uint64_t control_mask,
               std::complex<Scalar> u00, std::complex<Scalar> u01,
               std::complex<Scalar> u10, std::complex<Scalar> u11) {
  auto& a = s.amplitudes();
  const std::uint64_t tmask = s.mask(target);
  const auto dim = static_cast<std::uint64_t>(s.dim());
  // Enumerate indices with the target bit cleared: split i around the
  // target bit instead of testing every index.
  const std::uint64_t low = tmask - 1;
  for (std::uint64_t k = 0; k < dim / 2; ++k) {
    const std::uint64_t i0 = ((k & ~low) << 1) | (k & low);
    if ((i0 & control_mask) != control_mask) continue;
    const std::uint64_t i1 = i0 | tmask;
    const auto v0 = a(static_cast<Eigen::Index>(i0));
    const auto v1 = a(static_cast<Eigen::Index>(i1));
    a(static_cast<Eigen::Index>(i0)) = u00 * v0 + u01 * v1;
    a(static_cast<Eigen::Index>(i1)) = u10 * v0 + u11 * v1;
  }
}

template <typename Scalar>
void apply_x(BasicStatevector<Scalar>& s, int target, std::uint64_t control_mask) {
  auto& a = s.amplitudes();
  const std::uint64_t tmask = s.mask(target);
  const std::uint64_t low = tmask - 1;
  const auto dim = static_cast<std::uint64_t>(s.dim());
  for (std::uint64_t k = 0; k < dim / 2; ++k) {
    const std::uint64_t i0 = ((k & ~low) << 1) | (k & low);
    if ((i0 & control_mask) != control_mask) continue;
    std::swap(a(static_cast<Eigen::Index>(i0)), a(static_cast<Eigen::Index>(i0 | tmask)));
  }
}

/// Multiplies amplitudes with all bits of `mask` set by e^{i phi}.
template <typename Scalar>
void apply_phase(BasicStatevector<Scalar>& s, std::uint64_t mask, Scalar phi) {
  const std::complex<Scalar> f = std::polar(Scalar(1), phi);
  auto& a = s.amplitudes();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if ((static_cast<std::uint64_t>(i) & mask) == mask) a(i) *= f;
  }
}

/// exp(-i (pi/2) theta X_a X_b) = cos(pi theta/2) I - i sin(pi theta/2) X_a X_b.
template <typename Scalar>
void apply_exp_xx(BasicStatevector<Scalar>& s, int qa, int qb, Scalar theta) {
  const Scalar half = Scalar(EIGEN_PI) * theta / 2;
  const Scalar c = std::cos(half);
  const std::complex<Scalar> ms(0, -std::sin(half));
  const std::uint64_t ma = s.mask(qa), mb = s.mask(qb), flip = ma | mb;
  auto& a = s.amplitudes();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const auto ui = static_cast<std::uint64_t>(i);
    // Each pair {i, i^flip} is visited once, from its member with bit a clear.
    if (ui & ma) continue;
    const auto j = static_cast<Eigen::Index>(ui ^ flip);
    const auto vi = a(i), vj = a(j);
    a(i) = c * vi + ms * vj;
    a(j) = c * vj + ms * vi;
  }
}

/// exp(-i (pi/2) theta Z_a Z_b): phase e^{-i pi theta/2} where the bits agree,
/// e^{+i pi theta/2} where they differ.
template <typename Scalar>
void apply_exp_zz(BasicStatevector<Scalar>& s, int qa, int qb, Scalar theta) {
  const Scalar half = Scalar(EIGEN_PI) * theta / 2;
  const std::complex<Scalar> same = std::polar(Scalar(1), -half);
  const std::complex<Scalar> diff = std::polar(Scalar(1), half);
  const std::uint64_t ma = s.mask(qa), mb = s.mask(qb);
  auto& a = s.amplitudes();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const auto ui = static_cast<std::uint64_t>(i);
    const bool ba = (ui & ma) != 0, bb = (ui & mb) != 0;
    a(i) *= (ba == bb) ? same : diff;
  }
}

}  // namespace kernels

std::uint64_t control_mask(const Statevector& s, std::span<const int> controls);

/// Applies `gate` in place. Slot-parameterized gates read theta from params.
void apply_gate_inplace(Statevector& state, const Gate& gate, std::span<const double> params);

/// Applies a parameterized gate with an explicit theta instead of a slot lookup.
void apply_gate_inplace_with_theta(Statevector& state, const Gate& gate, double theta);

/// Hot-loop entry for gates already validated against this register (for
/// example by Circuit::append). `theta` is used only by slot gates.
void apply_gate_unchecked(Statevector& state, const Gate& gate, double theta, bool adjoint = false);

/// Applies the inverse of `gate` in place.
void apply_gate_adjoint_inplace(Statevector& state, const Gate& gate,
                                std::span<const double> params);

inline Statevector apply_gate(Statevector state, const Gate& gate,
                              std::span<const double> params = {}) {
  apply_gate_inplace(state, gate, params);
  return state;
}

/// Sum over basis states of (+1 if qubit bit is 0 else -1) * |a_i|^2.
double expectation_z(const Statevector& state, int qubit);

/// Dense 2^m x 2^m matrix of the gate embedded in an m-qubit register.
/// Built from explicit matrix elements and, for exponential-Pauli gates, a
/// dense matrix exponential, so it shares no code with the kernels above.
/// Refuses m > 6.
Eigen::MatrixXcd dense_unitary(const Gate& gate, int num_qubits,
                               std::span<const double> params = {});

/// `bitstring<TAB>re<TAB>im`, one line per basis state, 17 significant digits.
void write_state_dump(std::ostream& os, const Statevector& state);
std::string state_dump(const Statevector& state);

/// State with an extra least-significant qubit prepared in |+>.
Statevector append_plus_qubit(const Statevector& state);

}  // namespace frqinet
