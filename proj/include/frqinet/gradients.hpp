#pragma once

// Gradients of the readout expectation f(theta) = <Z_readout>.
//
// Every trainable gate is G(t) = exp(-i (pi/2) t P) with P^2 = I, so along
// one occurrence f(t) = A + B cos(pi t) + C sin(pi t). Then
//   f(t + 1/2) - f(t - 1/2) = 2 (C cos(pi t) - B sin(pi t)) = (2/pi) f'(t),
// i.e. df/dt = (pi/2) [f(t + 1/2) - f(t - 1/2)]. A slot shared by several
// gates gets the sum of its occurrence-local terms.

#include <numbers>
#include <span>
#include <vector>

#include "frqinet/qnn.hpp"

namespace frqinet {

using Gradient = std::vector<double>;

struct ShiftRule {
  double shift = 0.5;
  double scale = std::numbers::pi / 2;
};

/// One entry per parameterized gate, in circuit order.
struct OccurrenceTerm {
  std::size_t op_index;
  int slot;
  double value;
};

/// Occurrence-local shift terms scale * (f(+shift) - f(-shift)), each
/// shifting a single gate while every other gate keeps its slot value.
std::vector<OccurrenceTerm> occurrence_shift_terms(const Statevector& data_state,
                                                   const QnnModel& model,
                                                   std::span<const double> params,
                                                   ShiftRule rule = {});

/// Per-slot sum of occurrence_shift_terms. Two circuit evaluations per
/// occurrence; prefix states are reused across occurrences.
Gradient parameter_shift_grad(const Statevector& data_state, const QnnModel& model,
                              std::span<const double> params, ShiftRule rule = {});

struct ValueAndGradient {
  double value = 0.0;
  Gradient grad;
};

/// Evaluates the same per-occurrence shift difference in closed form with a
/// single backward sweep: for occurrence k,
///   (pi/2) [f(+1/2) - f(-1/2)] = pi * Im <lambda_k| P_k |psi_k>,
/// where psi_k is the state after gate k and lambda_k is Z_readout psi_N
/// propagated back through the gates after k. Cost is O(gates) state sweeps
/// instead of O(gates^2).
ValueAndGradient backward_shift_grad(const Statevector& data_state, const QnnModel& model,
                                     std::span<const double> params);

/// Input already carries the |+> readout.
ValueAndGradient backward_shift_grad_prepared(const Statevector& input, const QnnModel& model,
                                              std::span<const double> params);

/// Central differences, shifting every occurrence of a slot together.
Gradient finite_difference_grad(const Statevector& data_state, const QnnModel& model,
                                std::span<const double> params, double h);

}  // namespace frqinet
