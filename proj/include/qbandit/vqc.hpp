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
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qbandit/circuit.hpp"
#include "qbandit/errors.hpp"
#include "qbandit/random.hpp"
#include "qbandit/statevector.hpp"

namespace qbandit {

enum class Ansatz { Circuit1, Circuit2 };

inline const char *to_string(Ansatz a) { return a == Ansatz::Circuit1 ? "circuit1" : "circuit2"; }

/// Circuit1: hardware-efficient layers (RX encoding, RX/RY/RZ, CZ ring).
/// Circuit2: alternating Circuit-11 / Circuit-9 blocks, each preceded by the
/// RX feature map. In both, the feature map is re-uploaded every layer.
struct VqcConfig {
    Ansatz ansatz = Ansatz::Circuit1;
    int n_layers = 1;
    bool parallel_encoding = false;
    bool output_scaling = false;
    int n_features = 4;

    int n_qubits() const noexcept { return parallel_encoding ? 2 * n_features : n_features; }

    void validate() const {
        if (n_layers < 1) throw InvalidArgument("VqcConfig: n_layers must be >= 1");
        if (n_features < 1) throw InvalidArgument("VqcConfig: n_features must be >= 1");
        if (n_qubits() > kMaxQubits) throw InvalidArgument("VqcConfig: too many qubits");
        if (ansatz != Ansatz::Circuit1 && ansatz != Ansatz::Circuit2)
            throw InvalidArgument("VqcConfig: unsupported ansatz tag");
    }

    bool operator==(const VqcConfig &) const = default;
};

namespace detail {

class CircuitBuilder {
   public:
    CircuitBuilder(int n_qubits, int n_features) {
        spec_.n_qubits = n_qubits;
        spec_.n_features = static_cast<std::size_t>(n_features);
    }

    void feature_map() {
        for (int q = 0; q < spec_.n_qubits; ++q) {
            const auto feature = static_cast<std::size_t>(q) % spec_.n_features;
            spec_.gates.push_back(GateOp::rx(q, EncodingAngle{feature, spec_.n_encoding_weights++}));
        }
    }
    void rot(GateKind k, int q) { spec_.gates.push_back(GateOp::rotation(k, q, ParamAngle{spec_.n_params++})); }
    void h(int q) { spec_.gates.push_back(GateOp::h(q)); }
    void cz(int a, int b) { spec_.gates.push_back(GateOp::cz(a, b)); }
    void cnot(int c, int t) { spec_.gates.push_back(GateOp::cnot(c, t)); }

    int n() const { return spec_.n_qubits; }
    CircuitSpec finish() && { return std::move(spec_); }

   private:
    CircuitSpec spec_;
};

inline void circuit1_layer(CircuitBuilder &b) {
    const int n = b.n();
    b.feature_map();
    for (int q = 0; q < n; ++q) {
        b.rot(GateKind::RX, q);
        b.rot(GateKind::RY, q);
        b.rot(GateKind::RZ, q);
    }
    // CZ ring (0,1),(1,2),...,(n-1,0); two qubits get a single CZ.
    if (n == 2) {
        b.cz(0, 1);
    } else if (n > 2) {
        for (int q = 0; q < n; ++q) b.cz(q, (q + 1) % n);
    }
}

inline void circuit11_block(CircuitBuilder &b) {
    const int n = b.n();
    b.feature_map();
    for (int q = 0; q < n; ++q) b.rot(GateKind::RY, q);
    for (int q = 0; q < n; ++q) b.rot(GateKind::RZ, q);
    for (int k = 0; 2 * k + 1 < n; ++k) b.cnot(2 * k + 1, 2 * k);
    for (int q = 1; q + 1 < n; ++q) b.rot(GateKind::RY, q);
    for (int q = 1; q + 1 < n; ++q) b.rot(GateKind::RZ, q);
    for (int k = 0; 2 * k + 2 < n; ++k) b.cnot(2 * k + 2, 2 * k + 1);
}

inline void circuit9_block(CircuitBuilder &b) {
    const int n = b.n();
    b.feature_map();
    for (int q = 0; q < n; ++q) b.h(q);
    for (int q = n - 1; q > 0; --q) b.cz(q, q - 1);
    for (int q = 0; q < n; ++q) b.rot(GateKind::RX, q);
}

}  // namespace detail

inline CircuitSpec build_circuit(const VqcConfig &config) {
    config.validate();
    detail::CircuitBuilder b(config.n_qubits(), config.n_features);
    for (int layer = 0; layer < config.n_layers; ++layer) {
        if (config.ansatz == Ansatz::Circuit1)
            detail::circuit1_layer(b);
        else if (layer % 2 == 0)
            detail::circuit11_block(b);
        else
            detail::circuit9_block(b);
    }
    auto spec = std::move(b).finish();
    spec.validate();
    return spec;
}

struct VqcParams {
    std::vector<double> circuit_params;
    std::vector<double> encoding_weights;
    std::vector<double> output_weights;  // empty unless output_scaling
    double output_bias = 0.0;

    bool operator==(const VqcParams &) const = default;
};

inline std::size_t count_params(const VqcConfig &config) {
    const auto spec = build_circuit(config);
    const std::size_t out = config.output_scaling ? static_cast<std::size_t>(config.n_qubits()) + 1 : 0;
    return spec.n_params + spec.n_encoding_weights + out;
}

/// Quantum regression model f(x, theta) with a flat trainable vector laid out as
/// [circuit params | encoding weights | output weights | output bias].
class VqcModel {
   public:
    explicit VqcModel(const VqcConfig &config) : config_(config), circuit_(build_circuit(config)) {
        flat_.assign(count(), 0.0);
        auto enc = encoding_weights();
        std::fill(enc.begin(), enc.end(), 1.0);
        auto ow = output_weights();
        std::fill(ow.begin(), ow.end(), 1.0 / config_.n_qubits());
    }

    VqcModel(const VqcConfig &config, const VqcParams &params) : VqcModel(config) { set_params(params); }

    /// Circuit angles uniform in (-pi, pi]; encoding weights 1; output weights 1/n; bias 0.
    static VqcModel initialized(const VqcConfig &config, Rng &rng) {
        VqcModel m(config);
        for (auto &t : m.circuit_params()) t = std::numbers::pi - 2.0 * std::numbers::pi * rng.uniform();
        return m;
    }

    const VqcConfig &config() const noexcept { return config_; }
    const CircuitSpec &circuit() const noexcept { return circuit_; }
    std::size_t n_inputs() const noexcept { return static_cast<std::size_t>(config_.n_features); }
    std::size_t size() const noexcept { return flat_.size(); }

    std::span<double> flat() noexcept { return flat_; }
    std::span<const double> flat() const noexcept { return flat_; }

    std::span<double> circuit_params() noexcept { return std::span(flat_).subspan(0, circuit_.n_params); }
    std::span<const double> circuit_params() const noexcept { return std::span(flat_).subspan(0, circuit_.n_params); }
    std::span<double> encoding_weights() noexcept {
        return std::span(flat_).subspan(circuit_.n_params, circuit_.n_encoding_weights);
    }
    std::span<const double> encoding_weights() const noexcept {
        return std::span(flat_).subspan(circuit_.n_params, circuit_.n_encoding_weights);
    }
    std::span<double> output_weights() noexcept { return std::span(flat_).subspan(output_offset(), n_output_weights()); }
    std::span<const double> output_weights() const noexcept {
        return std::span(flat_).subspan(output_offset(), n_output_weights());
    }

    VqcParams params() const {
        VqcParams p;
        p.circuit_params.assign(circuit_params().begin(), circuit_params().end());
        p.encoding_weights.assign(encoding_weights().begin(), encoding_weights().end());
        p.output_weights.assign(output_weights().begin(), output_weights().end());
        p.output_bias = config_.output_scaling ? flat_.back() : 0.0;
        return p;
    }

    void set_params(const VqcParams &p) {
        if (p.circuit_params.size() != circuit_.n_params || p.encoding_weights.size() != circuit_.n_encoding_weights ||
            p.output_weights.size() != n_output_weights())
            throw ContractViolation("VqcParams shape does not match the configuration");
        std::copy(p.circuit_params.begin(), p.circuit_params.end(), circuit_params().begin());
        std::copy(p.encoding_weights.begin(), p.encoding_weights.end(), encoding_weights().begin());
        std::copy(p.output_weights.begin(), p.output_weights.end(), output_weights().begin());
        if (config_.output_scaling) flat_.back() = p.output_bias;
    }

    StateVector state(std::span<const double> input) const {
        check_input(input);
        return run_circuit(circuit_, circuit_params(), encoding_weights(), input);
    }

    double predict(std::span<const double> input) const {
        check_input(input);
        return readout(prepare(input, kNoGate, 0.0));
    }

    /// Prediction with `offset` added to the resolved angle of gate `gate_index`.
    double predict_shifted(std::span<const double> input, std::size_t gate_index, double offset) const {
        check_input(input);
        if (gate_index >= circuit_.gates.size()) throw InvalidArgument("gate index out of range");
        return readout(prepare(input, gate_index, offset));
    }

    /// d prediction / d angle for every gate (0 for gates without an angle),
    /// via the parameter-shift rule (f(a + pi/2) - f(a - pi/2)) / 2.
    std::vector<double> parameter_shift_angle_gradients(std::span<const double> input) const {
        std::vector<double> out(circuit_.gates.size(), 0.0);
        constexpr double s = std::numbers::pi / 2;
        for (std::size_t k = 0; k < circuit_.gates.size(); ++k) {
            if (!is_rotation(circuit_.gates[k].kind) || std::holds_alternative<FixedAngle>(circuit_.gates[k].angle))
                continue;
            out[k] = 0.5 * (predict_shifted(input, k, s) - predict_shifted(input, k, -s));
        }
        return out;
    }

    /// Full trainable gradient assembled from parameter-shift angle gradients.
    std::vector<double> parameter_shift_gradient(std::span<const double> input) const {
        std::vector<double> grad(flat_.size(), 0.0);
        const auto angle_grads = parameter_shift_angle_gradients(input);
        for (std::size_t k = 0; k < circuit_.gates.size(); ++k) scatter_angle_gradient(k, angle_grads[k], input, grad);
        if (config_.output_scaling) add_readout_gradient(state(input), 1.0, grad);
        return grad;
    }

    /// Adds upstream * d prediction / d flat into `grad` using reverse (adjoint)
    /// accumulation: one forward pass and one backward sweep. Returns the prediction.
    double accumulate_gradient(std::span<const double> input, double upstream, std::span<double> grad) const {
        check_input(input);
        if (grad.size() != flat_.size()) throw ContractViolation("gradient buffer size mismatch");
        const auto coeffs = readout_coefficients();
        StateVector psi(circuit_.n_qubits);
        const auto angle_grads =
            adjoint_angle_gradients(circuit_, circuit_params(), encoding_weights(), input, coeffs, &psi);
        const double value = readout(psi);
        if (config_.output_scaling) add_readout_gradient(psi, upstream, grad);
        for (std::size_t k = 0; k < angle_grads.size(); ++k) scatter_angle_gradient(k, upstream * angle_grads[k], input, grad);
        for (std::size_t i = 0; i < grad.size(); ++i)
            if (!std::isfinite(grad[i])) throw NumericFailure("non-finite VQC gradient", i);
        return value;
    }

    std::vector<double> gradient(std::span<const double> input, double upstream = 1.0) const {
        std::vector<double> g(flat_.size(), 0.0);
        accumulate_gradient(input, upstream, g);
        return g;
    }

   private:
    static constexpr std::size_t kNoGate = static_cast<std::size_t>(-1);

    std::size_t count() const { return circuit_.n_params + circuit_.n_encoding_weights + (config_.output_scaling ? n_output_weights() + 1 : 0); }
    std::size_t n_output_weights() const { return config_.output_scaling ? static_cast<std::size_t>(config_.n_qubits()) : 0; }
    std::size_t output_offset() const { return circuit_.n_params + circuit_.n_encoding_weights; }

    void check_input(std::span<const double> input) const {
        if (input.size() != static_cast<std::size_t>(config_.n_features))
            throw ContractViolation("VQC input length must equal n_features");
    }

    StateVector prepare(std::span<const double> input, std::size_t shifted_gate, double offset) const {
        StateVector psi(circuit_.n_qubits);
        const auto cp = circuit_params();
        const auto ew = encoding_weights();
        for (std::size_t k = 0; k < circuit_.gates.size(); ++k) {
            const GateOp &g = circuit_.gates[k];
            double angle = detail::resolve_angle(g, cp, ew, input);
            if (k == shifted_gate) angle += offset;
            detail::apply_resolved(psi.amplitudes(), g, angle);
        }
        return psi;
    }

    std::vector<double> readout_coefficients() const {
        if (config_.output_scaling) {
            const auto w = output_weights();
            return {w.begin(), w.end()};
        }
        return std::vector<double>(static_cast<std::size_t>(config_.n_qubits()), 1.0 / config_.n_qubits());
    }

    double readout(const StateVector &psi) const {
        const auto c = readout_coefficients();
        double f = config_.output_scaling ? flat_.back() : 0.0;
        for (int q = 0; q < config_.n_qubits(); ++q) f += c[q] * expectation_z(psi, q);
        return f;
    }

    void add_readout_gradient(const StateVector &psi, double upstream, std::span<double> grad) const {
        const std::size_t off = output_offset();
        for (int q = 0; q < config_.n_qubits(); ++q) grad[off + q] += upstream * expectation_z(psi, q);
        grad[off + n_output_weights()] += upstream;
    }

    void scatter_angle_gradient(std::size_t k, double angle_grad, std::span<const double> input,
                                std::span<double> grad) const {
        const GateOp &g = circuit_.gates[k];
        if (const auto *p = std::get_if<ParamAngle>(&g.angle)) {
            grad[p->index] += angle_grad;
        } else if (const auto *e = std::get_if<EncodingAngle>(&g.angle)) {
            grad[circuit_.n_params + e->weight_index] += input[e->feature_index] * angle_grad;
        }
    }

    VqcConfig config_;
    CircuitSpec circuit_;
    std::vector<double> flat_;
};

inline double predict(const VqcConfig &config, const VqcParams &params, std::span<const double> scaled_input) {
    return VqcModel(config, params).predict(scaled_input);
}

/// upstream * d f / d (every trainable value), shaped like VqcParams.
inline VqcParams gradient(const VqcConfig &config, const VqcParams &params, std::span<const double> scaled_input,
                          double upstream = 1.0) {
    VqcModel model(config, params);
    VqcModel shaped(config);
    std::span<double> g = shaped.flat();
    std::fill(g.begin(), g.end(), 0.0);
    model.accumulate_gradient(scaled_input, upstream, g);
    return shaped.params();
}

}  // namespace qbandit
