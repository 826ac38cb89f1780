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
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qbandit/errors.hpp"

namespace qbandit {

using cplx = std::complex<double>;

inline constexpr int kMaxQubits = 10;

/// Dense amplitude vector over n qubits. Basis index bit q is the value of qubit q.
class StateVector {
   public:
    /// |0...0> on n qubits.
    explicit StateVector(int n_qubits) : n_qubits_(checked(n_qubits)), amps_(std::size_t{1} << n_qubits, cplx{0.0, 0.0}) {
        amps_[0] = cplx{1.0, 0.0};
    }

    StateVector(int n_qubits, std::vector<cplx> amplitudes) : n_qubits_(checked(n_qubits)), amps_(std::move(amplitudes)) {
        if (amps_.size() != (std::size_t{1} << n_qubits_))
            throw InvalidArgument("amplitude count must equal 2^n_qubits");
    }

    int n_qubits() const noexcept { return n_qubits_; }
    std::size_t size() const noexcept { return amps_.size(); }

    std::span<const cplx> amplitudes() const noexcept { return amps_; }
    std::span<cplx> amplitudes() noexcept { return amps_; }

    const cplx &operator[](std::size_t i) const { return amps_[i]; }
    cplx &operator[](std::size_t i) { return amps_[i]; }

    double norm_squared() const noexcept {
        double s = 0.0;
        for (const auto &a : amps_) s += std::norm(a);
        return s;
    }

    bool operator==(const StateVector &) const = default;

   private:
    static int checked(int n) {
        if (n < 1 || n > kMaxQubits) throw InvalidArgument("n_qubits must be in [1, 10], got " + std::to_string(n));
        return n;
    }

    int n_qubits_;
    std::vector<cplx> amps_;
};

inline StateVector init_zero(int n_qubits) { return StateVector(n_qubits); }

enum class GateKind : std::uint8_t { RX, RY, RZ, H, CZ, CNOT };

inline const char *to_string(GateKind k) {
    switch (k) {
        case GateKind::RX: return "RX";
        case GateKind::RY: return "RY";
        case GateKind::RZ: return "RZ";
        case GateKind::H: return "H";
        case GateKind::CZ: return "CZ";
        case GateKind::CNOT: return "CNOT";
    }
    return "?";
}

inline constexpr bool is_rotation(GateKind k) noexcept {
    return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ;
}

inline constexpr bool is_two_qubit(GateKind k) noexcept { return k == GateKind::CZ || k == GateKind::CNOT; }

/// Angle sources for rotation gates.
struct FixedAngle {
    double value;
    bool operator==(const FixedAngle &) const = default;
};
struct ParamAngle {
    std::size_t index;
    bool operator==(const ParamAngle &) const = default;
};
/// angle = encoding_weights[weight_index] * input[feature_index]
struct EncodingAngle {
    std::size_t feature_index;
    std::size_t weight_index;
    bool operator==(const EncodingAngle &) const = default;
};
using AngleSource = std::variant<std::monostate, FixedAngle, ParamAngle, EncodingAngle>;

/// One gate of a circuit. For CNOT, qubits[0] is the control and qubits[1] the target.
/// Construct through the named factories; they enforce the arity rules.
struct GateOp {
    GateKind kind;
    std::array<int, 2> qubits{0, -1};
    AngleSource angle;

    int arity() const noexcept { return is_two_qubit(kind) ? 2 : 1; }

    static GateOp rotation(GateKind kind, int qubit, AngleSource source) {
        if (!is_rotation(kind)) throw InvalidArgument("rotation factory needs RX/RY/RZ");
        if (std::holds_alternative<std::monostate>(source)) throw InvalidArgument("rotation needs an angle source");
        check_index(qubit);
        return GateOp{kind, {qubit, -1}, source};
    }
    static GateOp rx(int q, AngleSource s) { return rotation(GateKind::RX, q, s); }
    static GateOp ry(int q, AngleSource s) { return rotation(GateKind::RY, q, s); }
    static GateOp rz(int q, AngleSource s) { return rotation(GateKind::RZ, q, s); }
    static GateOp h(int q) {
        check_index(q);
        return GateOp{GateKind::H, {q, -1}, std::monostate{}};
    }
    static GateOp cz(int a, int b) { return two(GateKind::CZ, a, b); }
    static GateOp cnot(int control, int target) { return two(GateKind::CNOT, control, target); }

    bool operator==(const GateOp &) const = default;

   private:
    static void check_index(int q) {
        if (q < 0 || q >= kMaxQubits) throw InvalidArgument("qubit index out of range");
    }
    static GateOp two(GateKind kind, int a, int b) {
        check_index(a);
        check_index(b);
        if (a == b) throw InvalidArgument("two-qubit gate needs distinct qubits");
        return GateOp{kind, {a, b}, std::monostate{}};
    }
};

namespace detail {

using Mat2 = std::array<cplx, 4>;  // row-major

inline Mat2 rotation_matrix(GateKind kind, double theta) {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    switch (kind) {
        case GateKind::RX: return {cplx{c, 0}, cplx{0, -s}, cplx{0, -s}, cplx{c, 0}};
        case GateKind::RY: return {cplx{c, 0}, cplx{-s, 0}, cplx{s, 0}, cplx{c, 0}};
        case GateKind::RZ: return {cplx{c, -s}, cplx{0, 0}, cplx{0, 0}, cplx{c, s}};
        default: break;
    }
    throw InvalidArgument("not a rotation gate");
}

inline void apply_mat2(std::span<cplx> amps, int q, const Mat2 &m) {
    const std::size_t stride = std::size_t{1} << q;
    const std::size_t n = amps.size();
    for (std::size_t base = 0; base < n; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const cplx a0 = amps[i];
            const cplx a1 = amps[i + stride];
            amps[i] = m[0] * a0 + m[1] * a1;
            amps[i + stride] = m[2] * a0 + m[3] * a1;
        }
    }
}

inline void apply_rz(std::span<cplx> amps, int q, double theta) {
    const cplx p0 = std::polar(1.0, -0.5 * theta);
    const cplx p1 = std::polar(1.0, 0.5 * theta);
    const std::size_t mask = std::size_t{1} << q;
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] *= (i & mask) ? p1 : p0;
}

inline void apply_h(std::span<cplx> amps, int q) {
    const double r = 1.0 / std::sqrt(2.0);
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const cplx a0 = amps[i];
            const cplx a1 = amps[i + stride];
            amps[i] = r * (a0 + a1);
            amps[i + stride] = r * (a0 - a1);
        }
    }
}

inline void apply_cz(std::span<cplx> amps, int a, int b) {
    const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
    for (std::size_t i = 0; i < amps.size(); ++i)
        if ((i & mask) == mask) amps[i] = -amps[i];
}

inline void apply_cnot(std::span<cplx> amps, int control, int target) {
    const std::size_t cm = std::size_t{1} << control;
    const std::size_t tm = std::size_t{1} << target;
    for (std::size_t i = 0; i < amps.size(); ++i)
        if ((i & cm) && !(i & tm)) std::swap(amps[i], amps[i | tm]);
}

/// In-place application with an already-resolved angle. No validation.
inline void apply_resolved(std::span<cplx> amps, const GateOp &g, double angle) {
    switch (g.kind) {
        case GateKind::RX:
        case GateKind::RY: apply_mat2(amps, g.qubits[0], rotation_matrix(g.kind, angle)); break;
        case GateKind::RZ: apply_rz(amps, g.qubits[0], angle); break;
        case GateKind::H: apply_h(amps, g.qubits[0]); break;
        case GateKind::CZ: apply_cz(amps, g.qubits[0], g.qubits[1]); break;
        case GateKind::CNOT: apply_cnot(amps, g.qubits[0], g.qubits[1]); break;
    }
}

/// In-place application of the Pauli generator P of a rotation exp(-i theta P / 2).
inline void apply_generator(std::span<cplx> amps, GateKind kind, int q) {
    const std::size_t stride = std::size_t{1} << q;
    switch (kind) {
        case GateKind::RX:
            for (std::size_t i = 0; i < amps.size(); ++i)
                if (!(i & stride)) std::swap(amps[i], amps[i | stride]);
            return;
        case GateKind::RY:
            for (std::size_t i = 0; i < amps.size(); ++i) {
                if (i & stride) continue;
                const cplx a0 = amps[i];
                const cplx a1 = amps[i | stride];
                amps[i] = cplx{0, -1} * a1;
                amps[i | stride] = cplx{0, 1} * a0;
            }
            return;
        case GateKind::RZ:
            for (std::size_t i = 0; i < amps.size(); ++i)
                if (i & stride) amps[i] = -amps[i];
            return;
        default: break;
    }
    throw InvalidArgument("generator requested for a non-rotation gate");
}

inline void check_gate_fits(const GateOp &g, int n_qubits) {
    for (int k = 0; k < g.arity(); ++k)
        if (g.qubits[k] < 0 || g.qubits[k] >= n_qubits)
            throw InvalidArgument(std::string(to_string(g.kind)) + ": qubit index " + std::to_string(g.qubits[k]) +
                                  " out of range for " + std::to_string(n_qubits) + " qubits");
}

}  // namespace detail

/// Applies one gate. `angle` must be given exactly when the gate is a rotation.
inline StateVector apply_gate(StateVector state, const GateOp &gate, std::optional<double> angle = std::nullopt) {
    detail::check_gate_fits(gate, state.n_qubits());
    if (is_rotation(gate.kind) != angle.has_value())
        throw ContractViolation(is_rotation(gate.kind) ? "rotation gate applied without an angle"
                                                       : "angle supplied for a fixed gate");
    detail::apply_resolved(state.amplitudes(), gate, angle.value_or(0.0));
    return state;
}

/// <Z_q> = sum_b (+1 if bit q of b is 0 else -1) |amp_b|^2
inline double expectation_z(const StateVector &state, int qubit) {
    if (qubit < 0 || qubit >= state.n_qubits()) throw InvalidArgument("expectation_z: qubit index out of range");
    const std::size_t mask = std::size_t{1} << qubit;
    double e = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) e += (i & mask) ? -std::norm(amps[i]) : std::norm(amps[i]);
    return std::clamp(e, -1.0, 1.0);
}

}  // namespace qbandit
