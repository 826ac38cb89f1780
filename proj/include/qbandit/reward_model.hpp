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

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qbandit/mlp.hpp"
#include "qbandit/vqc.hpp"

namespace qbandit {

/// Trainable predictor over scaled (p, v, g, h): either a VQC or an MLP.
class RewardModel {
   public:
    RewardModel(VqcModel m) : impl_(std::move(m)) {}  // NOLINT(google-explicit-constructor)
    RewardModel(MlpModel m) : impl_(std::move(m)) {}  // NOLINT(google-explicit-constructor)

    bool is_quantum() const noexcept { return std::holds_alternative<VqcModel>(impl_); }
    const char *kind() const noexcept { return is_quantum() ? "vqc" : "mlp"; }

    double predict(std::span<const double> x) const {
        return std::visit([&](const auto &m) { return m.predict(x); }, impl_);
    }
    /// Adds upstream * d f / d params into `grad`; returns f(x).
    double accumulate_gradient(std::span<const double> x, double upstream, std::span<double> grad) const {
        return std::visit([&](const auto &m) { return m.accumulate_gradient(x, upstream, grad); }, impl_);
    }
    std::span<double> flat() {
        return std::visit([](auto &m) { return m.flat(); }, impl_);
    }
    std::span<const double> flat() const {
        return std::visit([](const auto &m) { return std::span<const double>(m.flat()); }, impl_);
    }
    std::size_t size() const {
        return std::visit([](const auto &m) { return m.size(); }, impl_);
    }
    std::size_t n_inputs() const {
        return std::visit([](const auto &m) { return m.n_inputs(); }, impl_);
    }

    const VqcModel *vqc() const { return std::get_if<VqcModel>(&impl_); }
    const MlpModel *mlp() const { return std::get_if<MlpModel>(&impl_); }

   private:
    std::variant<VqcModel, MlpModel> impl_;
};

}  // namespace qbandit
