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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qbandit/errors.hpp"
#include "qbandit/random.hpp"

namespace qbandit {

enum class Activation { Relu, Tanh, Sin };

inline const char *to_string(Activation a) {
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Sin: return "sin";
    }
    return "?";
}

struct MlpConfig {
    int n_layers = 1;  // hidden layers
    int hidden_size = 40;
    Activation activation = Activation::Relu;
    int input_dim = 4;
    int output_dim = 1;

    void validate() const {
        if (n_layers < 1) throw InvalidArgument("MlpConfig: at least one hidden layer is required");
        if (hidden_size < 1 || input_dim < 1) throw InvalidArgument("MlpConfig: sizes must be positive");
        if (output_dim != 1) throw InvalidArgument("MlpConfig: output_dim must be 1");
    }

    bool operator==(const MlpConfig &) const = default;
};

inline std::size_t count_params(const MlpConfig &c) {
    c.validate();
    const std::size_t in = static_cast<std::size_t>(c.input_dim);
    const std::size_t h = static_cast<std::size_t>(c.hidden_size);
    std::size_t n = in * h + h;
    n += static_cast<std::size_t>(c.n_layers - 1) * (h * h + h);
    n += h * static_cast<std::size_t>(c.output_dim) + static_cast<std::size_t>(c.output_dim);
    return n;
}

namespace detail {

inline double activate(Activation a, double z) {
    switch (a) {
        case Activation::Relu: return z < 0.0 ? 0.0 : z;  // NaN passes through
        case Activation::Tanh: return std::tanh(z);
        case Activation::Sin: return std::sin(z);
    }
    return z;
}

inline double activate_derivative(Activation a, double z) {
    switch (a) {
        case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: {
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
        case Activation::Sin: return std::cos(z);
    }
    return 1.0;
}

}  // namespace detail

/// Dense layer shapes: weights are row-major (out x in), stored before the bias.
struct DenseShape {
    std::size_t in;
    std::size_t out;
    std::size_t offset;  // start of the weights in the flat vector

    std::size_t bias_offset() const { return offset + in * out; }
};

/// Feed-forward regression network. Hidden layers share one width and
/// activation; the output layer is affine.
class MlpModel {
   public:
    explicit MlpModel(const MlpConfig &config) : config_(config) {
        config_.validate();
        std::size_t in = static_cast<std::size_t>(config_.input_dim);
        std::size_t off = 0;
        for (int l = 0; l <= config_.n_layers; ++l) {
            const std::size_t out =
                l == config_.n_layers ? static_cast<std::size_t>(config_.output_dim) : static_cast<std::size_t>(config_.hidden_size);
            layers_.push_back({in, out, off});
            off += in * out + out;
            in = out;
        }
        flat_.assign(off, 0.0);
    }

    /// Glorot-uniform weights, zero biases.
    static MlpModel initialized(const MlpConfig &config, Rng &rng) {
        MlpModel m(config);
        for (const auto &L : m.layers_) {
            const double limit = std::sqrt(6.0 / static_cast<double>(L.in + L.out));
            for (std::size_t i = 0; i < L.in * L.out; ++i) m.flat_[L.offset + i] = rng.uniform(-limit, limit);
        }
        return m;
    }

    const MlpConfig &config() const noexcept { return config_; }
    std::span<const DenseShape> layers() const noexcept { return layers_; }
    std::size_t n_inputs() const noexcept { return static_cast<std::size_t>(config_.input_dim); }
    std::size_t size() const noexcept { return flat_.size(); }
    std::span<double> flat() noexcept { return flat_; }
    std::span<const double> flat() const noexcept { return flat_; }

    double predict(std::span<const double> input) const {
        check_input(input);
        std::vector<double> a(input.begin(), input.end());
        std::vector<double> next;
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            affine(layers_[l], a, next);
            if (l + 1 < layers_.size())
                for (auto &z : next) z = detail::activate(config_.activation, z);
            a.swap(next);
        }
        return a[0];
    }

    /// Adds upstream * d predict / d flat into `grad` (reverse mode).
    /// Returns the prediction at `input`.
    double accumulate_gradient(std::span<const double> input, double upstream, std::span<double> grad) const {
        check_input(input);
        if (grad.size() != flat_.size()) throw ContractViolation("gradient buffer size mismatch");
        // activations[l] is the input to layer l; pre[l] its pre-activation output.
        std::vector<std::vector<double>> activations(layers_.size() + 1);
        std::vector<std::vector<double>> pre(layers_.size());
        activations[0].assign(input.begin(), input.end());
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            affine(layers_[l], activations[l], pre[l]);
            activations[l + 1] = pre[l];
            if (l + 1 < layers_.size())
                for (auto &z : activations[l + 1]) z = detail::activate(config_.activation, z);
        }
        std::vector<double> delta{upstream};  // d out / d pre of the current layer
        for (std::size_t l = layers_.size(); l-- > 0;) {
            const auto &L = layers_[l];
            const auto &a = activations[l];
            for (std::size_t o = 0; o < L.out; ++o) {
                grad[L.bias_offset() + o] += delta[o];
                for (std::size_t i = 0; i < L.in; ++i) grad[L.offset + o * L.in + i] += delta[o] * a[i];
            }
            if (l == 0) break;
            std::vector<double> prev(L.in, 0.0);
            for (std::size_t o = 0; o < L.out; ++o)
                for (std::size_t i = 0; i < L.in; ++i) prev[i] += flat_[L.offset + o * L.in + i] * delta[o];
            for (std::size_t i = 0; i < L.in; ++i) prev[i] *= detail::activate_derivative(config_.activation, pre[l - 1][i]);
            delta.swap(prev);
        }
        for (std::size_t i = 0; i < grad.size(); ++i)
            if (!std::isfinite(grad[i])) throw NumericFailure("non-finite MLP gradient", i);
        if (!std::isfinite(activations.back()[0])) throw NumericFailure("non-finite MLP output", 0);
        return activations.back()[0];
    }

    std::vector<double> gradient(std::span<const double> input, double upstream = 1.0) const {
        std::vector<double> g(flat_.size(), 0.0);
        accumulate_gradient(input, upstream, g);
        return g;
    }

    /// Weight (row-major out x in) and bias views of layer l.
    std::span<double> weights(std::size_t l) { return std::span(flat_).subspan(layers_[l].offset, layers_[l].in * layers_[l].out); }
    std::span<double> bias(std::size_t l) { return std::span(flat_).subspan(layers_[l].bias_offset(), layers_[l].out); }

   private:
    void check_input(std::span<const double> input) const {
        if (input.size() != static_cast<std::size_t>(config_.input_dim))
            throw ContractViolation("MLP input length must equal input_dim");
    }

    void affine(const DenseShape &L, std::span<const double> a, std::vector<double> &out) const {
        out.assign(L.out, 0.0);
        for (std::size_t o = 0; o < L.out; ++o) {
            double z = flat_[L.bias_offset() + o];
            const double *w = &flat_[L.offset + o * L.in];
            for (std::size_t i = 0; i < L.in; ++i) z += w[i] * a[i];
            out[o] = z;
        }
    }

    MlpConfig config_;
    std::vector<DenseShape> layers_;
    std::vector<double> flat_;
};

/// Per-layer view of MLP parameters: weights[l] is row-major (out x in).
struct MlpParams {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    bool operator==(const MlpParams &) const = default;
};

inline MlpParams to_params(MlpModel &model) {
    MlpParams p;
    for (std::size_t l = 0; l < model.layers().size(); ++l) {
        const auto w = model.weights(l);
        const auto b = model.bias(l);
        p.weights.emplace_back(w.begin(), w.end());
        p.biases.emplace_back(b.begin(), b.end());
    }
    return p;
}

inline MlpModel make_mlp(const MlpConfig &config, const MlpParams &params) {
    MlpModel m(config);
    if (params.weights.size() != m.layers().size() || params.biases.size() != m.layers().size())
        throw ContractViolation("MlpParams layer count does not match the configuration");
    for (std::size_t l = 0; l < m.layers().size(); ++l) {
        auto w = m.weights(l);
        auto b = m.bias(l);
        if (params.weights[l].size() != w.size() || params.biases[l].size() != b.size())
            throw ContractViolation("MlpParams layer shape does not match the configuration");
        std::copy(params.weights[l].begin(), params.weights[l].end(), w.begin());
        std::copy(params.biases[l].begin(), params.biases[l].end(), b.begin());
    }
    return m;
}

inline double predict(const MlpConfig &config, const MlpParams &params, std::span<const double> scaled_input) {
    return make_mlp(config, params).predict(scaled_input);
}

inline MlpParams gradient(const MlpConfig &config, const MlpParams &params, std::span<const double> scaled_input,
                          double upstream = 1.0) {
    const MlpModel m = make_mlp(config, params);
    MlpModel shaped(config);
    m.accumulate_gradient(scaled_input, upstream, shaped.flat());
    return to_params(shaped);
}

}  // namespace qbandit
