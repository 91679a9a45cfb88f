#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "frqinet/statevector.hpp"
#include "support.hpp"

using namespace frqinet;
using frqinet::testing::max_abs_diff;
using frqinet::testing::kAllKinds;
using frqinet::testing::min_qubits;
using frqinet::testing::pick;
using frqinet::testing::random_gate;
using frqinet::testing::random_state;

namespace {

constexpr double kPi = std::numbers::pi;

// exp(A) by a long Taylor series; only for tiny matrices.
Eigen::MatrixXcd taylor_exp(const Eigen::MatrixXcd& a) {
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  Eigen::MatrixXcd term = sum;
  for (int k = 1; k < 40; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

}  // namespace

TEST(Statevector, StartsInZeroAndValidatesLength) {
  Statevector s(3);
  EXPECT_EQ(s.dim(), 8);
  EXPECT_EQ(s[0], std::complex<double>(1.0));
  EXPECT_THROW(Statevector(Statevector::Amplitudes::Zero(3)), std::invalid_argument);
  EXPECT_THROW(Statevector(Statevector::Amplitudes()), std::invalid_argument);
  EXPECT_THROW(Statevector(-1), std::invalid_argument);
}

TEST(Statevector, HadamardOnZeroGivesPlus) {
  const Statevector s = apply_gate(Statevector(1), gates::h(0));
  EXPECT_NEAR(s[0].real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s[1].real(), 1 / std::sqrt(2.0), 1e-15);
}

TEST(Statevector, CnotFlipsTargetWhenControlSet) {
  // |10>: qubit 0 is the most significant bit.
  const Statevector s = apply_gate(Statevector::basis(2, 0b10), gates::cnot(0, 1));
  EXPECT_EQ(s[0b11], std::complex<double>(1.0));
  EXPECT_EQ(s[0b10], std::complex<double>(0.0));
}

TEST(Statevector, BigEndianQubitOrder) {
  const Statevector s = apply_gate(Statevector(3), gates::x(0));
  EXPECT_EQ(s[0b100], std::complex<double>(1.0));
  EXPECT_EQ(s.mask(2), 1u);
}

TEST(Statevector, ExpXXAtZeroIsIdentity) {
  std::mt19937_64 rng(3);
  const Statevector s = random_state(2, rng);
  const std::vector<double> params{0.0};
  const Statevector t = apply_gate(s, gates::exp_xx(0, 1, 0), params);
  EXPECT_LT(max_abs_diff(s.amplitudes(), t.amplitudes()), 1e-15);
}

TEST(Statevector, ExpXXMatchesTaylorExponential) {
  Eigen::Matrix4cd xx = Eigen::Matrix4cd::Zero();
  xx(0, 3) = xx(1, 2) = xx(2, 1) = xx(3, 0) = 1.0;
  const double theta = 0.3;
  const Eigen::MatrixXcd u = taylor_exp(std::complex<double>(0, -kPi / 2 * theta) * xx);
  const std::vector<double> params{theta};
  const Statevector s = apply_gate(Statevector(2), gates::exp_xx(0, 1, 0), params);
  EXPECT_LT(max_abs_diff(s.amplitudes(), u.col(0)), 1e-12);
  EXPECT_NEAR(s[0].real(), std::cos(0.15 * kPi), 1e-15);
  EXPECT_NEAR(s[3].imag(), -std::sin(0.15 * kPi), 1e-15);
}

TEST(Statevector, ExpZZMatchesTaylorExponential) {
  Eigen::Matrix4cd zz = Eigen::Vector4cd(1, -1, -1, 1).asDiagonal();
  const double theta = -0.7;
  const Eigen::MatrixXcd u = taylor_exp(std::complex<double>(0, -kPi / 2 * theta) * zz);
  std::mt19937_64 rng(4);
  const Statevector s = random_state(2, rng);
  const std::vector<double> params{theta};
  const Statevector t = apply_gate(s, gates::exp_zz(0, 1, 0), params);
  EXPECT_LT(max_abs_diff(t.amplitudes(), u * s.amplitudes()), 1e-12);
}

TEST(DenseUnitary, Definitions) {
  Eigen::Matrix2cd h;
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  EXPECT_LT((dense_unitary(gates::h(0), 1) - h).cwiseAbs().maxCoeff(), 1e-15);

  Eigen::Matrix2cd x;
  x << 0, 1, 1, 0;
  EXPECT_EQ(dense_unitary(gates::x(0), 1), Eigen::MatrixXcd(x));

  Eigen::MatrixXcd toffoli = Eigen::MatrixXcd::Identity(8, 8);
  toffoli.block(6, 6, 2, 2) = x;
  EXPECT_EQ(dense_unitary(gates::mcx({0, 1}, 2), 3), toffoli);
}

TEST(DenseUnitary, RefusesLargeRegisters) {
  EXPECT_THROW(dense_unitary(gates::h(0), 7), std::invalid_argument);
}

TEST(Statevector, EveryGateKindMatchesDenseOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> theta(-2.0, 2.0);
  for (GateKind k : kAllKinds) {
    for (int m = min_qubits(k); m <= 4; ++m) {
      for (int trial = 0; trial < 100; ++trial) {
        const Gate g = random_gate(k, m, rng);
        const std::vector<double> params{theta(rng)};
        const Statevector s = random_state(m, rng);
        const Statevector got = apply_gate(s, g, params);
        const Eigen::VectorXcd want = dense_unitary(g, m, params) * s.amplitudes();
        ASSERT_LT(max_abs_diff(got.amplitudes(), want), 1e-10)
            << gate_name(k) << " m=" << m << " trial=" << trial;
        ASSERT_NEAR(got.norm(), 1.0, 1e-10);
      }
    }
  }
}

TEST(Statevector, AdjointUndoesGate) {
  std::mt19937_64 rng(12);
  for (GateKind k : kAllKinds) {
    const Gate g = random_gate(k, 4, rng);
    const std::vector<double> params{0.37};
    const Statevector s = random_state(4, rng);
    Statevector t = apply_gate(s, g, params);
    apply_gate_adjoint_inplace(t, g, params);
    EXPECT_LT(max_abs_diff(s.amplitudes(), t.amplitudes()), 1e-13) << gate_name(k);
  }
}

TEST(Statevector, GatesAreLinear) {
  std::mt19937_64 rng(13);
  const std::complex<double> alpha(0.3, -1.2), beta(2.0, 0.5);
  for (GateKind k : kAllKinds) {
    const int m = 3;
    const Gate g = random_gate(k, m, rng);
    const std::vector<double> params{0.81};
    const Statevector s1 = random_state(m, rng), s2 = random_state(m, rng);
    const Statevector mix(Statevector::Amplitudes(alpha * s1.amplitudes() + beta * s2.amplitudes()));
    const Statevector lhs = apply_gate(mix, g, params);
    const Eigen::VectorXcd rhs = alpha * apply_gate(s1, g, params).amplitudes() +
                                 beta * apply_gate(s2, g, params).amplitudes();
    EXPECT_LT(max_abs_diff(lhs.amplitudes(), rhs), 1e-10) << gate_name(k);
  }
}

TEST(Statevector, NormSurvivesLongGateSequences) {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> kind(0, 8);
  std::uniform_real_distribution<double> theta(-3.0, 3.0);
  Statevector s = random_state(4, rng);
  for (int i = 0; i < 2000; ++i) {
    const std::vector<double> params{theta(rng)};
    apply_gate_inplace(s, random_gate(kAllKinds[kind(rng)], 4, rng), params);
  }
  EXPECT_NEAR(s.norm(), 1.0, 1e-10);
}

TEST(Statevector, InvalidGatesAreRejected) {
  Statevector s(2);
  const std::vector<double> params{0.1};
  EXPECT_THROW(apply_gate_inplace(s, gates::h(2), params), InvalidGate);
  EXPECT_THROW(apply_gate_inplace(s, gates::cnot(1, 1), params), InvalidGate);
  EXPECT_THROW(apply_gate_inplace(s, gates::exp_xx(0, 0, 0), params), InvalidGate);
  EXPECT_THROW(apply_gate_inplace(s, gates::exp_zz(0, 1, 1), params), InvalidGate);
  EXPECT_THROW(apply_gate_inplace(s, gates::mcx({}, 1), params), InvalidGate);
  EXPECT_THROW(apply_gate_inplace(s, gates::mcx({0, 0}, 1), params), InvalidGate);
  EXPECT_THROW(apply_gate_inplace(s, gates::cry(-1, 0, 0.2), params), InvalidGate);
}

TEST(ExpectationZ, KnownStates) {
  EXPECT_NEAR(expectation_z(apply_gate(Statevector(1), gates::h(0)), 0), 0.0, 1e-15);
  EXPECT_EQ(expectation_z(Statevector::basis(1, 1), 0), -1.0);
  EXPECT_EQ(expectation_z(Statevector(1), 0), 1.0);
  EXPECT_THROW(expectation_z(Statevector(2), 2), std::out_of_range);
}

TEST(ExpectationZ, MatchesBruteForceSum) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const Statevector s = random_state(3, rng);
    for (int q = 0; q < 3; ++q) {
      double want = 0.0;
      for (int i = 0; i < 8; ++i) {
        const int bit = (i >> (2 - q)) & 1;
        want += (bit ? -1.0 : 1.0) * std::norm(s[i]);
      }
      const double got = expectation_z(s, q);
      EXPECT_NEAR(got, want, 1e-14);
      EXPECT_LE(std::abs(got), 1.0 + 1e-15);
    }
  }
}

TEST(Statevector, FloatInstantiationWorks) {
  BasicStatevector<float> s(2);
  kernels::apply_exp_xx(s, 0, 1, 1.0f);
  EXPECT_NEAR(std::abs(s[3]), 1.0f, 1e-6f);
}

TEST(StateDump, TabSeparatedBitstrings) {
  const Statevector s = apply_gate(Statevector(2), gates::h(1));
  const std::string dump = state_dump(s);
  EXPECT_EQ(dump.substr(0, 3), "00\t");
  EXPECT_NE(dump.find("01\t0.70710678118654746\t0\n"), std::string::npos);
  EXPECT_EQ(std::count(dump.begin(), dump.end(), '\n'), 4);
}

TEST(Statevector, AppendPlusQubitIsLeastSignificant) {
  const Statevector s = append_plus_qubit(Statevector::basis(1, 1));
  EXPECT_EQ(s.num_qubits(), 2);
  EXPECT_NEAR(s[0b10].real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s[0b11].real(), 1 / std::sqrt(2.0), 1e-15);
}
