#include "frqinet/gradients.hpp"

#include <stdexcept>

namespace frqinet {

namespace {

void check_params(const QnnModel& model, std::span<const double> params) {
  if (params.size() != static_cast<std::size_t>(model.num_params())) {
    throw std::invalid_argument("gradient: parameter count mismatch");
  }
}

double theta_of(const Gate& g, std::span<const double> params) {
  return g.parameterized() ? params[static_cast<std::size_t>(g.slot)] : 0.0;
}

// f with gate `k` evaluated at `theta_k`, starting from the state just
// before gate k.
double eval_suffix(Statevector s, const QnnModel& model, std::span<const double> params,
                   std::size_t k, double theta_k) {
  const auto& ops = model.circuit().ops();
  apply_gate_unchecked(s, ops[k], theta_k);
  for (std::size_t j = k + 1; j < ops.size(); ++j) {
    apply_gate_unchecked(s, ops[j], theta_of(ops[j], params));
  }
  return expectation_z(s, model.spec().readout_qubit());
}

// <lambda| P |psi> for the Pauli string of an XX or ZZ gate.
std::complex<double> pauli_overlap(const Statevector& lambda, const Statevector& psi,
                                   const Gate& g) {
  const std::uint64_t ma = psi.mask(g.targets[0]), mb = psi.mask(g.targets[1]);
  const auto& l = lambda.amplitudes();
  const auto& p = psi.amplitudes();
  std::complex<double> acc = 0.0;
  if (g.kind == GateKind::ExpXX) {
    const std::uint64_t flip = ma | mb;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      acc += std::conj(l(i)) * p(static_cast<Eigen::Index>(static_cast<std::uint64_t>(i) ^ flip));
    }
  } else {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const auto ui = static_cast<std::uint64_t>(i);
      const bool same = ((ui & ma) != 0) == ((ui & mb) != 0);
      acc += same ? std::conj(l(i)) * p(i) : -std::conj(l(i)) * p(i);
    }
  }
  return acc;
}

}  // namespace

std::vector<OccurrenceTerm> occurrence_shift_terms(const Statevector& data_state,
                                                   const QnnModel& model,
                                                   std::span<const double> params,
                                                   ShiftRule rule) {
  check_params(model, params);
  const auto& ops = model.circuit().ops();
  Statevector s = prepare_input(data_state, model);
  std::vector<OccurrenceTerm> terms;
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const Gate& g = ops[k];
    if (g.parameterized()) {
      const double t = params[static_cast<std::size_t>(g.slot)];
      const double plus = eval_suffix(s, model, params, k, t + rule.shift);
      const double minus = eval_suffix(s, model, params, k, t - rule.shift);
      terms.push_back({k, g.slot, rule.scale * (plus - minus)});
    }
    apply_gate_unchecked(s, g, theta_of(g, params));
  }
  return terms;
}

Gradient parameter_shift_grad(const Statevector& data_state, const QnnModel& model,
                              std::span<const double> params, ShiftRule rule) {
  Gradient grad(static_cast<std::size_t>(model.num_params()), 0.0);
  for (const auto& t : occurrence_shift_terms(data_state, model, params, rule)) {
    grad[static_cast<std::size_t>(t.slot)] += t.value;
  }
  return grad;
}

ValueAndGradient backward_shift_grad_prepared(const Statevector& input, const QnnModel& model,
                                              std::span<const double> params) {
  check_params(model, params);
  const auto& ops = model.circuit().ops();
  const int readout = model.spec().readout_qubit();

  Statevector psi = input;
  simulate_inplace(model.circuit(), psi, params);

  ValueAndGradient out;
  out.value = expectation_z(psi, readout);
  out.grad.assign(static_cast<std::size_t>(model.num_params()), 0.0);

  Statevector lambda = psi;
  {
    const std::uint64_t m = lambda.mask(readout);
    auto& a = lambda.amplitudes();
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (static_cast<std::uint64_t>(i) & m) a(i) = -a(i);
    }
  }

  for (std::size_t k = ops.size(); k-- > 0;) {
    const Gate& g = ops[k];
    const double t = theta_of(g, params);
    if (g.parameterized()) {
      out.grad[static_cast<std::size_t>(g.slot)] +=
          std::numbers::pi * pauli_overlap(lambda, psi, g).imag();
    }
    apply_gate_unchecked(psi, g, t, /*adjoint=*/true);
    apply_gate_unchecked(lambda, g, t, /*adjoint=*/true);
  }
  return out;
}

ValueAndGradient backward_shift_grad(const Statevector& data_state, const QnnModel& model,
                                     std::span<const double> params) {
  return backward_shift_grad_prepared(prepare_input(data_state, model), model, params);
}

Gradient finite_difference_grad(const Statevector& data_state, const QnnModel& model,
                                std::span<const double> params, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_difference_grad: h must be positive");
  check_params(model, params);
  const Statevector input = prepare_input(data_state, model);
  std::vector<double> p(params.begin(), params.end());
  Gradient grad(p.size());
  for (std::size_t s = 0; s < p.size(); ++s) {
    const double t = p[s];
    p[s] = t + h;
    const double plus = forward_prepared(input, model, p);
    p[s] = t - h;
    const double minus = forward_prepared(input, model, p);
    p[s] = t;
    grad[s] = (plus - minus) / (2 * h);
  }
  return grad;
}

}  // namespace frqinet
