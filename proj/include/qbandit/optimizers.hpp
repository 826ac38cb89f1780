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

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qbandit/errors.hpp"

namespace qbandit {

enum class OptimizerKind { Adam, Sgd };

inline const char *to_string(OptimizerKind k) { return k == OptimizerKind::Adam ? "adam" : "sgd"; }

/// First-order update rule over a flat parameter vector. Adam uses
/// beta1 = 0.9, beta2 = 0.999, eps = 1e-7 with bias-corrected step size; SGD is plain.
class GradientOptimizer {
   public:
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEpsilon = 1e-7;

    GradientOptimizer(OptimizerKind kind, std::size_t n, double learning_rate)
        : kind_(kind), lr_(learning_rate), m_(kind == OptimizerKind::Adam ? n : 0, 0.0),
          v_(kind == OptimizerKind::Adam ? n : 0, 0.0) {}

    double learning_rate() const noexcept { return lr_; }
    void set_learning_rate(double lr) noexcept { lr_ = lr; }
    OptimizerKind kind() const noexcept { return kind_; }

    void step(std::span<double> params, std::span<const double> grad) {
        if (params.size() != grad.size()) throw ContractViolation("optimizer: gradient size mismatch");
        if (kind_ == OptimizerKind::Sgd) {
            for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_ * grad[i];
            return;
        }
        if (m_.size() != params.size()) throw ContractViolation("optimizer: parameter count changed");
        ++t_;
        const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
        const double step = lr_ * std::sqrt(bc2) / bc1;
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
            v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
            params[i] -= step * m_[i] / (std::sqrt(v_[i]) + kEpsilon);
        }
    }

   private:
    OptimizerKind kind_;
    double lr_;
    std::vector<double> m_, v_;
    long long t_ = 0;
};

}  // namespace qbandit
