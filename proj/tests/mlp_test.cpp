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

#include "qbandit/mlp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace qbandit;

namespace {

MlpConfig cfg(int layers, int width, Activation act, int in = 4) {
    MlpConfig c;
    c.n_layers = layers;
    c.hidden_size = width;
    c.activation = act;
    c.input_dim = in;
    return c;
}

oracle::DenseNet to_oracle(const MlpModel &m) {
    oracle::DenseNet net;
    net.activation = static_cast<int>(m.config().activation);
    const auto flat = m.flat();
    for (const auto &L : m.layers()) {
        std::vector<std::vector<double>> w(L.out, std::vector<double>(L.in));
        for (std::size_t o = 0; o < L.out; ++o)
            for (std::size_t i = 0; i < L.in; ++i) w[o][i] = flat[L.offset + o * L.in + i];
        net.w.push_back(w);
        net.b.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(L.bias_offset()),
                           flat.begin() + static_cast<std::ptrdiff_t>(L.bias_offset() + L.out));
    }
    return net;
}

MlpModel random_net(const MlpConfig &c, std::uint64_t seed) {
    Rng rng(seed);
    auto m = MlpModel::initialized(c, rng);
    for (auto &v : m.flat()) v += rng.uniform(-0.1, 0.1);  // nonzero biases too
    return m;
}

}  // namespace

TEST(Mlp, count_params) {
    EXPECT_EQ(count_params(cfg(1, 40, Activation::Relu)), 241u);
    EXPECT_EQ(count_params(cfg(2, 64, Activation::Relu)), 4545u);
    EXPECT_THROW(count_params(cfg(0, 40, Activation::Relu)), InvalidArgument);
    EXPECT_EQ(MlpModel(cfg(2, 64, Activation::Tanh)).size(), 4545u);
}

TEST(Mlp, zero_network_outputs_zero) {
    MlpModel m(cfg(1, 40, Activation::Tanh));
    const std::vector<double> x{0.3, -0.2, 0.9, 0.1};
    EXPECT_EQ(m.predict(x), 0.0);
}

TEST(Mlp, degenerate_identity_net) {
    MlpModel m(cfg(1, 1, Activation::Relu, 1));
    m.weights(0)[0] = 1.0;
    m.weights(1)[0] = 1.0;
    const std::vector<double> x{0.5};
    EXPECT_DOUBLE_EQ(m.predict(x), 0.5);
}

TEST(Mlp, matches_matrix_oracle) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> xd(-1, 1);
    for (int t = 0; t < 30; ++t) {
        const auto m = random_net(cfg(1 + t % 4, 5 + t, static_cast<Activation>(t % 3)), t);
        const std::vector<double> x{xd(rng), xd(rng), xd(rng), xd(rng)};
        EXPECT_NEAR(m.predict(x), to_oracle(m)(x), 1e-12);
    }
}

TEST(Mlp, params_view_round_trip) {
    const auto m = random_net(cfg(2, 7, Activation::Sin), 4);
    MlpModel copy = m;
    const auto p = to_params(copy);
    const std::vector<double> x{0.1, 0.2, 0.3, 0.4};
    EXPECT_EQ(predict(m.config(), p, x), m.predict(x));
    auto bad = p;
    bad.weights[0].pop_back();
    EXPECT_THROW(make_mlp(m.config(), bad), ContractViolation);
}

TEST(Mlp, zero_weight_relu_gradient_flows_only_through_biases) {
    MlpModel m(cfg(2, 6, Activation::Relu));
    const std::vector<double> x{0.5, -0.5, 0.2, 0.7};
    const auto g = m.gradient(x);
    // output bias gets 1; every weight and hidden bias sees a zero upstream or zero activation
    const auto &L = m.layers();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double want = i == L.back().bias_offset() ? 1.0 : 0.0;
        EXPECT_EQ(g[i], want) << i;
    }
    const auto fd = oracle::central_differences(
        [&](const std::vector<double> &t) {
            MlpModel c = m;
            std::copy(t.begin(), t.end(), c.flat().begin());
            return c.predict(x);
        },
        std::vector<double>(m.flat().begin(), m.flat().end()), 1e-5);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g[i], fd[i], 1e-8) << i;
}

TEST(Mlp, sin_activation_derivative_at_zero) {
    // single hidden unit: out = w2 sin(w1 x + b1) + b2, d out / d b1 = w2 cos(b1) = w2 at b1 = 0
    MlpModel m(cfg(1, 1, Activation::Sin, 1));
    m.weights(1)[0] = 0.7;
    const std::vector<double> x{0.0};
    const auto g = m.gradient(x);
    EXPECT_DOUBLE_EQ(g[m.layers()[0].bias_offset()], 0.7);
}

TEST(Mlp, gradient_matches_finite_differences) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> xd(-1, 1);
    for (int t = 0; t < 12; ++t) {
        const auto m = random_net(cfg(1 + t % 4, 3 + t % 5, static_cast<Activation>(t % 3)), 50 + t);
        const std::vector<double> x{xd(rng), xd(rng), xd(rng), xd(rng)};
        const auto g = m.gradient(x);
        const auto fd = oracle::central_differences([&](const std::vector<double> &th) {
            MlpModel c = m;
            std::copy(th.begin(), th.end(), c.flat().begin());
            return c.predict(x);
        }, std::vector<double>(m.flat().begin(), m.flat().end()), 1e-5);
        for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LT(oracle::rel_error(g[i], fd[i]), 1e-4) << t << ":" << i;
    }
}

TEST(Mlp, relu_is_affine_within_a_linear_region) {
    const auto m = random_net(cfg(3, 16, Activation::Relu), 9);
    const std::vector<double> x{0.4, -0.3, 0.6, 0.2};
    // the activation pattern stays fixed for small alpha changes, so f(alpha x) is affine in alpha
    auto f = [&](double a) {
        std::vector<double> y(x);
        for (auto &v : y) v *= a;
        return m.predict(y);
    };
    const double a0 = 1.0, h = 1e-4;
    const double slope = (f(a0 + h) - f(a0)) / h;
    EXPECT_NEAR(f(a0 + 2 * h), f(a0) + 2 * h * slope, 1e-10);
    EXPECT_NEAR(f(a0 - h), f(a0) - h * slope, 1e-10);
}

TEST(Mlp, sin_network_output_is_bounded) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> xd(-50, 50);
    for (int t = 0; t < 10; ++t) {
        auto m = random_net(cfg(1 + t % 3, 10, Activation::Sin), t);
        double bound = std::abs(m.bias(m.layers().size() - 1)[0]);
        for (double w : m.weights(m.layers().size() - 1)) bound += std::abs(w);
        for (int k = 0; k < 100; ++k) {
            const std::vector<double> x{xd(rng), xd(rng), xd(rng), xd(rng)};
            EXPECT_LE(std::abs(m.predict(x)), bound + 1e-12);
        }
    }
}

TEST(Mlp, shape_errors) {
    MlpModel m(cfg(1, 4, Activation::Relu));
    const std::vector<double> x{0.1};
    EXPECT_THROW(m.predict(x), ContractViolation);
    MlpModel bad(cfg(1, 2, Activation::Relu));
    bad.weights(0)[0] = std::numeric_limits<double>::quiet_NaN();
    const std::vector<double> x4{1, 1, 1, 1};
    EXPECT_THROW(bad.gradient(x4), NumericFailure);
}
