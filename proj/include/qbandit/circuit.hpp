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
#include "qbandit/statevector.hpp"

namespace qbandit {

/// Compiled ansatz: an ordered gate list plus the sizes of the arrays that
/// feed its parameter and encoding slots.
struct CircuitSpec {
    int n_qubits = 1;
    std::size_t n_features = 0;
    std::size_t n_params = 0;
    std::size_t n_encoding_weights = 0;
    std::vector<GateOp> gates;

    /// Checks every gate against the register size and the slot counts.
    void validate() const {
        if (n_qubits < 1 || n_qubits > kMaxQubits) throw InvalidArgument("circuit n_qubits out of range");
        for (const auto &g : gates) {
            detail::check_gate_fits(g, n_qubits);
            if (const auto *p = std::get_if<ParamAngle>(&g.angle); p && p->index >= n_params)
                throw InvalidArgument("parameter slot index out of range");
            if (const auto *e = std::get_if<EncodingAngle>(&g.angle)) {
                if (e->feature_index >= n_features) throw InvalidArgument("encoding feature index out of range");
                if (e->weight_index >= n_encoding_weights) throw InvalidArgument("encoding weight index out of range");
            }
        }
    }

    bool operator==(const CircuitSpec &) const = default;
};

namespace detail {

inline double resolve_angle(const GateOp &g, std::span<const double> params, std::span<const double> enc_weights,
                            std::span<const double> input) {
    if (const auto *f = std::get_if<FixedAngle>(&g.angle)) return f->value;
    if (const auto *p = std::get_if<ParamAngle>(&g.angle)) return params[p->index];
    if (const auto *e = std::get_if<EncodingAngle>(&g.angle))
        return enc_weights[e->weight_index] * input[e->feature_index];
    return 0.0;
}

inline void check_circuit_args(const CircuitSpec &c, std::span<const double> params,
                               std::span<const double> enc_weights, std::span<const double> input) {
    if (params.size() != c.n_params) throw ContractViolation("run_circuit: parameter count mismatch");
    if (enc_weights.size() != c.n_encoding_weights) throw ContractViolation("run_circuit: encoding weight count mismatch");
    if (input.size() != c.n_features) throw ContractViolation("run_circuit: input length mismatch");
}

}  // namespace detail

/// Prepares U(x, theta)|0...0> by applying the gates in order.
inline StateVector run_circuit(const CircuitSpec &circuit, std::span<const double> params,
                               std::span<const double> encoding_weights, std::span<const double> scaled_input) {
    circuit.validate();
    detail::check_circuit_args(circuit, params, encoding_weights, scaled_input);
    StateVector state(circuit.n_qubits);
    for (const auto &g : circuit.gates)
        detail::apply_resolved(state.amplitudes(), g, detail::resolve_angle(g, params, encoding_weights, scaled_input));
    return state;
}

namespace detail {

/// Im <lambda| P_q |psi> for the generator P of a rotation gate.
inline double generator_overlap_imag(const StateVector &lambda, const StateVector &psi, GateKind kind, int q) {
    const auto l = lambda.amplitudes();
    const auto s = psi.amplitudes();
    const std::size_t m = std::size_t{1} << q;
    cplx z{0.0, 0.0};
    switch (kind) {
        case GateKind::RX:
            for (std::size_t i = 0; i < s.size(); ++i) z += std::conj(l[i]) * s[i ^ m];
            break;
        case GateKind::RY:
            for (std::size_t i = 0; i < s.size(); ++i)
                z += std::conj(l[i]) * ((i & m) ? cplx{0, 1} * s[i ^ m] : cplx{0, -1} * s[i ^ m]);
            break;
        case GateKind::RZ:
            for (std::size_t i = 0; i < s.size(); ++i) z += (i & m) ? -std::conj(l[i]) * s[i] : std::conj(l[i]) * s[i];
            break;
        default: return 0.0;
    }
    return z.imag();
}

}  // namespace detail

/// Gradient of sum_q coeffs[q] <Z_q> with respect to the resolved angle of every
/// gate (zero for gates without a trainable angle), by adjoint differentiation.
/// For R(a) = exp(-i a P / 2): d f / d a = Im <lambda_k| P |psi_k>, with both
/// states taken just after gate k. Optionally returns the final state.
inline std::vector<double> adjoint_angle_gradients(const CircuitSpec &circuit, std::span<const double> params,
                                                   std::span<const double> encoding_weights,
                                                   std::span<const double> scaled_input,
                                                   std::span<const double> coeffs, StateVector *final_state = nullptr) {
    if (coeffs.size() != static_cast<std::size_t>(circuit.n_qubits))
        throw ContractViolation("one readout coefficient per qubit is required");
    StateVector psi = run_circuit(circuit, params, encoding_weights, scaled_input);
    if (final_state) *final_state = psi;
    StateVector lambda = psi;
    {
        auto l = lambda.amplitudes();
        for (std::size_t i = 0; i < l.size(); ++i) {
            double d = 0.0;
            for (int q = 0; q < circuit.n_qubits; ++q) d += ((i >> q) & 1U) ? -coeffs[q] : coeffs[q];
            l[i] *= d;
        }
    }
    std::vector<double> grads(circuit.gates.size(), 0.0);
    for (std::size_t k = circuit.gates.size(); k-- > 0;) {
        const GateOp &g = circuit.gates[k];
        const double angle = detail::resolve_angle(g, params, encoding_weights, scaled_input);
        if (is_rotation(g.kind) && !std::holds_alternative<FixedAngle>(g.angle))
            grads[k] = detail::generator_overlap_imag(lambda, psi, g.kind, g.qubits[0]);
        detail::apply_resolved(psi.amplitudes(), g, -angle);
        detail::apply_resolved(lambda.amplitudes(), g, -angle);
    }
    return grads;
}

}  // namespace qbandit
