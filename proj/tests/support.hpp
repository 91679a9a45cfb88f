#pragma once

#include <complex>
#include <cstdint>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "frqinet/frqi.hpp"
#include "frqinet/statevector.hpp"

namespace frqinet::testing {

constexpr double kPi = std::numbers::pi;

inline const GateKind kAllKinds[] = {GateKind::H,       GateKind::X,
                              GateKind::Ry,      GateKind::CNOT,
                              GateKind::ControlledRy, GateKind::ControlledPhase,
                              GateKind::MultiControlledX, GateKind::ExpXX,
                              GateKind::ExpZZ};

inline int min_qubits(GateKind k) {
  switch (k) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::Ry:
      return 1;
    default:
      return 2;
  }
}

inline std::vector<int> pick(int m, int count, std::mt19937_64& rng) {
  std::vector<int> q(static_cast<std::size_t>(m));
  std::iota(q.begin(), q.end(), 0);
  std::shuffle(q.begin(), q.end(), rng);
  q.resize(static_cast<std::size_t>(count));
  return q;
}

inline Gate random_gate(GateKind k, int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-2 * kPi, 2 * kPi);
  switch (k) {
    case GateKind::H: return gates::h(pick(m, 1, rng)[0]);
    case GateKind::X: return gates::x(pick(m, 1, rng)[0]);
    case GateKind::Ry: return gates::ry(pick(m, 1, rng)[0], ang(rng));
    case GateKind::CNOT: {
      auto q = pick(m, 2, rng);
      return gates::cnot(q[0], q[1]);
    }
    case GateKind::ControlledRy: {
      auto q = pick(m, 2, rng);
      return gates::cry(q[0], q[1], ang(rng));
    }
    case GateKind::ControlledPhase: {
      auto q = pick(m, 2, rng);
      return gates::cphase(q[0], q[1], ang(rng));
    }
    case GateKind::MultiControlledX: {
      const int k_controls = std::uniform_int_distribution<int>(1, m - 1)(rng);
      auto q = pick(m, k_controls + 1, rng);
      const int target = q.back();
      q.pop_back();
      return gates::mcx(q, target);
    }
    case GateKind::ExpXX: {
      auto q = pick(m, 2, rng);
      return gates::exp_xx(q[0], q[1], 0);
    }
    case GateKind::ExpZZ: {
      auto q = pick(m, 2, rng);
      return gates::exp_zz(q[0], q[1], 0);
    }
  }
  return gates::h(0);
}

// Enumerates every basis component |pixel bits>|color> of the full state,
// maps the two trailing pixel bits a, b onto the color angle
// theta + (pi/4)(a + b/2), sums the collisions and normalizes.
inline Eigen::VectorXcd compressed_oracle(const BinaryImage& img) {
  const int n = img.log2_side();
  const int bits = 2 * n;
  const double amp = std::pow(2.0, -n);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(Eigen::Index{1} << (bits - 2 + 1));
  for (int r = 0; r < img.side(); ++r) {
    for (int c = 0; c < img.side(); ++c) {
      const unsigned q = static_cast<unsigned>(r * img.side() + c);
      for (int color = 0; color <= 1; ++color) {
        // amplitude of |q>|color> in the uncompressed image state
        const double full_amp = (img.at(r, c) ? color == 1 : color == 0) ? amp : 0.0;
        if (full_amp == 0.0) continue;
        const int a = (q >> 1) & 1;  // qubit 2n-2
        const int b = q & 1;         // qubit 2n-1
        const double theta = kPi / 2 * color + kPi / 4 * (a + b / 2.0);
        const unsigned reduced = q >> 2;
        out(2 * reduced) += full_amp * std::cos(theta);
        out(2 * reduced + 1) += full_amp * std::sin(theta);
      }
    }
  }
  return out / out.norm();
}


inline Statevector random_state(int qubits, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Statevector::Amplitudes a(Eigen::Index{1} << qubits);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = {d(rng), d(rng)};
  a /= a.norm();
  return Statevector(std::move(a));
}

inline BinaryImage random_image(int side, std::mt19937_64& rng, double white_prob = 0.5) {
  std::bernoulli_distribution d(white_prob);
  BinaryImage img(side);
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) img.set(r, c, d(rng));
  return img;
}

inline double max_abs_diff(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Removes one overall phase, aligned on the largest-magnitude entry of `ref`.
inline double max_abs_diff_up_to_phase(const Eigen::MatrixXcd& got, const Eigen::MatrixXcd& ref) {
  Eigen::Index r = 0, c = 0;
  ref.cwiseAbs().maxCoeff(&r, &c);
  const std::complex<double> phase = ref(r, c) / got(r, c);
  return (got * (phase / std::abs(phase)) - ref).cwiseAbs().maxCoeff();
}

}  // namespace frqinet::testing
