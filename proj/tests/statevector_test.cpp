// Copyright 2026 The qbandit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qbandit/statevector.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qbandit/circuit.hpp"

using namespace qbandit;

namespace {

constexpr double kPi = std::numbers::pi;

void expect_amp(const StateVector &s, std::size_t i, cplx want, double tol = 1e-14) {
    EXPECT_NEAR(s[i].real(), want.real(), tol) << "amp " << i;
    EXPECT_NEAR(s[i].imag(), want.imag(), tol) << "amp " << i;
}

}  // namespace

TEST(StateVector, init_zero) {
    for (int n : {1, 2, 4}) {
        const auto s = init_zero(n);
        ASSERT_EQ(s.size(), std::size_t{1} << n);
        expect_amp(s, 0, {1, 0}, 0);
        for (std::size_t i = 1; i < s.size(); ++i) expect_amp(s, i, {0, 0}, 0);
    }
    EXPECT_THROW(init_zero(0), InvalidArgument);
    EXPECT_THROW(init_zero(11), InvalidArgument);
}

TEST(StateVector, gate_definitions) {
    auto s = apply_gate(init_zero(1), GateOp::rx(0, FixedAngle{kPi}), kPi);
    expect_amp(s, 0, {0, 0});
    expect_amp(s, 1, {0, -1});

    s = apply_gate(init_zero(1), GateOp::h(0));
    expect_amp(s, 0, {1 / std::sqrt(2.0), 0});
    expect_amp(s, 1, {1 / std::sqrt(2.0), 0});

    StateVector eleven(2, {0, 0, 0, 1});
    s = apply_gate(eleven, GateOp::cz(0, 1));
    expect_amp(s, 3, {-1, 0});

    // |01> with q1 = 1 is basis index 2; CNOT(ctrl 1, tgt 0) flips q0 -> index 3.
    StateVector q1_set(2, {0, 0, 1, 0});
    s = apply_gate(q1_set, GateOp::cnot(1, 0));
    expect_amp(s, 3, {1, 0});
    expect_amp(s, 2, {0, 0});
}

TEST(StateVector, apply_gate_errors) {
    EXPECT_THROW(apply_gate(init_zero(2), GateOp::h(3)), InvalidArgument);
    EXPECT_THROW(apply_gate(init_zero(2), GateOp::cz(0, 2)), InvalidArgument);
    EXPECT_THROW(apply_gate(init_zero(1), GateOp::rx(0, ParamAngle{0})), ContractViolation);
    EXPECT_THROW(apply_gate(init_zero(1), GateOp::h(0), 0.3), ContractViolation);
    EXPECT_THROW(GateOp::cz(1, 1), InvalidArgument);
    EXPECT_THROW(GateOp::rotation(GateKind::RX, 0, std::monostate{}), InvalidArgument);
}

TEST(StateVector, expectation_z) {
    EXPECT_EQ(expectation_z(init_zero(1), 0), 1.0);
    EXPECT_EQ(expectation_z(StateVector(1, {0, 1}), 0), -1.0);
    EXPECT_THROW(expectation_z(init_zero(2), 2), InvalidArgument);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-10, 10);
    for (int i = 0; i < 100; ++i) {
        const double x = d(rng);
        const auto s = apply_gate(init_zero(1), GateOp::rx(0, FixedAngle{x}), x);
        EXPECT_NEAR(expectation_z(s, 0), std::cos(x), 1e-12);
    }
}

TEST(StateVector, run_circuit_small_cases) {
    CircuitSpec empty{4, 0, 0, 0, {}};
    EXPECT_EQ(run_circuit(empty, {}, {}, {}), init_zero(4));

    CircuitSpec enc{1, 1, 0, 1, {GateOp::rx(0, EncodingAngle{0, 0})}};
    const std::vector<double> w{1.0}, x{kPi};
    const auto s = run_circuit(enc, {}, w, x);
    expect_amp(s, 0, {0, 0});
    expect_amp(s, 1, {0, -1});

    const std::vector<double> bad{1.0, 2.0};
    EXPECT_THROW(run_circuit(enc, {}, w, bad), ContractViolation);
    EXPECT_THROW(run_circuit(enc, bad, w, x), ContractViolation);
}

TEST(StateVector, random_circuits_match_dense_oracle) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> nq(1, 4), ng(0, 50);
    double worst = 0.0, worst_norm = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
        const int n = nq(rng);
        const int count = ng(rng);
        CircuitSpec spec{n, 0, 0, 0, {}};
        std::vector<double> angles;
        for (int k = 0; k < count; ++k) {
            auto [g, a] = oracle::random_gate(rng, n);
            spec.gates.push_back(g);
            angles.push_back(a);
        }
        const auto got = run_circuit(spec, {}, {}, {});
        const auto want = oracle::dense_run(spec.gates, angles, n);
        for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
        worst_norm = std::max(worst_norm, std::abs(got.norm_squared() - 1.0));
        for (int q = 0; q < n; ++q) {
            const double z = expectation_z(got, q);
            EXPECT_GE(z, -1.0);
            EXPECT_LE(z, 1.0);
        }
    }
    EXPECT_LT(worst, 1e-10);
    EXPECT_LT(worst_norm, 1e-12);
}

TEST(StateVector, final_rz_leaves_z_expectations_unchanged) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> a(-kPi, kPi);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 4;
        StateVector s = init_zero(n);
        for (int k = 0; k < 20; ++k) {
            auto [g, ang] = oracle::random_gate(rng, n);
            s = apply_gate(s, g, is_rotation(g.kind) ? std::optional<double>(ang) : std::nullopt);
        }
        const int q = trial % n;
        const auto after = apply_gate(s, GateOp::rz(q, FixedAngle{0}), a(rng));
        for (int k = 0; k < n; ++k) EXPECT_NEAR(expectation_z(s, k), expectation_z(after, k), 1e-12);
    }
}
