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
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "qbandit/errors.hpp"
#include "qbandit/random.hpp"

namespace qbandit {

/// Steering triple (velocity v, gain g, shift h), each in [0, 100].
using Steering = std::array<double, 3>;
using Action = std::array<double, 3>;

namespace plant {

inline constexpr double kLag = 0.1;
inline constexpr double kLower = 0.0;
inline constexpr double kUpper = 100.0;
inline constexpr double kInitialSteering = 50.0;
inline constexpr int kSwingInSteps = 100;
inline constexpr int kMeasureSteps = 100;
/// The operating point counts as reached once every effective value is this
/// close to its commanded value.
inline constexpr double kSettleTolerance = 1e-3;
inline constexpr int kMaxTransitionSteps = 10000;

inline double v_opt(double p) { return 33.7 + 0.31 * p; }
inline double g_opt(double p) { return 61.3 - 0.27 * p; }
inline double h_opt(double p) { return 47.9 + 17.3 * std::sin(std::numbers::pi * p / 100.0); }

inline double noise_std(double p) { return 2.0 + 0.05 * p; }

inline double consumption(double p, double v, double g) {
    const double dv = v - v_opt(p);
    const double dg = g - g_opt(p);
    return 80.0 + 1.2 * p + (0.9 * dv * dv + 0.7 * dg * dg + 0.3 * dv * dg) / 100.0;
}

inline double fatigue(double p, double v, double h) {
    const double dh = h - h_opt(p);
    const double over = std::max(0.0, v - 70.0);
    return 5.0 + 0.8 * dh * dh / 100.0 + 0.6 * over * over / 50.0;
}

}  // namespace plant

/// Deterministic reward of the operating point (p, v, g, h) with the lag settled and no noise.
inline double noise_free_fitness(double p, double v, double g, double h) {
    return -plant::consumption(p, v, g) - 3.0 * plant::fatigue(p, v, h);
}

struct TrueOptimum {
    Steering steering;
    double fitness;
};

inline TrueOptimum true_optimum(double p) {
    if (!(p >= plant::kLower && p <= plant::kUpper)) throw InvalidArgument("setpoint must lie in [0, 100]");
    return {{plant::v_opt(p), plant::g_opt(p), plant::h_opt(p)}, -(95.0 + 1.2 * p)};
}

/// Noise stream identity: draws are keyed by (seed, stream, step) so results do
/// not depend on evaluation order.
struct NoiseKey {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    bool enabled = true;

    bool operator==(const NoiseKey &) const = default;
};

struct PlantState {
    double setpoint = 0.0;
    Steering commanded{plant::kInitialSteering, plant::kInitialSteering, plant::kInitialSteering};
    Steering effective{plant::kInitialSteering, plant::kInitialSteering, plant::kInitialSteering};
    NoiseKey noise;
    std::uint64_t step_count = 0;

    static PlantState at(double setpoint, NoiseKey noise) {
        if (!(setpoint >= plant::kLower && setpoint <= plant::kUpper))
            throw InvalidArgument("setpoint must lie in [0, 100]");
        PlantState s;
        s.setpoint = setpoint;
        s.noise = noise;
        return s;
    }

    bool operator==(const PlantState &) const = default;
};

struct StepResult {
    PlantState state;
    double reward;
};

/// One transition: commanded += action (clamped), effective follows by a first
/// order lag, reward = -c - 3f on the effective steering plus heteroscedastic noise.
inline StepResult step(PlantState state, const Action &action) {
    for (double a : action)
        if (!(a >= -1.0 && a <= 1.0)) throw InvalidArgument("action components must lie in [-1, 1]");
    for (std::size_t i = 0; i < 3; ++i) {
        state.commanded[i] = std::clamp(state.commanded[i] + action[i], plant::kLower, plant::kUpper);
        state.effective[i] = (1.0 - plant::kLag) * state.effective[i] + plant::kLag * state.commanded[i];
        state.effective[i] = std::clamp(state.effective[i], plant::kLower, plant::kUpper);
    }
    const auto &e = state.effective;
    double reward = noise_free_fitness(state.setpoint, e[0], e[1], e[2]);
    if (state.noise.enabled)
        reward += plant::noise_std(state.setpoint) * keyed_normal(state.noise.seed, state.noise.stream, state.step_count);
    ++state.step_count;
    return {state, reward};
}

namespace detail {

inline double max_abs_diff(const Steering &a, const Steering &b) {
    double m = 0.0;
    for (std::size_t i = 0; i < 3; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace detail

/// Full measurement protocol for one operating point: drive the commanded
/// steering to `target` with saturated per-axis actions (fractional last step),
/// wait until the effective steering has reached it, swing in with zero actions,
/// then average the reward over the measurement window.
inline double measure_operating_point(double p, const Steering &target, NoiseKey noise) {
    for (double t : target)
        if (!(t >= plant::kLower && t <= plant::kUpper)) throw InvalidArgument("steering target must lie in [0, 100]");
    PlantState s = PlantState::at(p, noise);
    constexpr Action zero{0.0, 0.0, 0.0};
    int guard = 0;
    while (detail::max_abs_diff(s.commanded, target) > 0.0 && guard++ < plant::kMaxTransitionSteps) {
        Action a;
        for (std::size_t i = 0; i < 3; ++i) a[i] = std::clamp(target[i] - s.commanded[i], -1.0, 1.0);
        s = step(s, a).state;
        // The last fractional step can land one ulp off; snap onto the target.
        if (detail::max_abs_diff(s.commanded, target) < 1e-12) s.commanded = target;
    }
    guard = 0;
    while (detail::max_abs_diff(s.effective, s.commanded) > plant::kSettleTolerance && guard++ < plant::kMaxTransitionSteps)
        s = step(s, zero).state;
    for (int t = 0; t < plant::kSwingInSteps; ++t) s = step(s, zero).state;
    double sum = 0.0;
    for (int t = 0; t < plant::kMeasureSteps; ++t) {
        auto r = step(s, zero);
        s = r.state;
        sum += r.reward;
    }
    return sum / plant::kMeasureSteps;
}

/// One grid point of the collected dataset.
struct GridSample {
    double p, v, g, h;
    double y;

    std::array<double, 4> x() const { return {p, v, g, h}; }
    bool operator==(const GridSample &) const = default;
};

struct CollectOptions {
    std::uint64_t seed = 0;
    int grid_step = 10;
    bool noise = true;
};

/// Axis values {0, step, ..., 100}.
inline std::vector<double> grid_axis(int grid_step) {
    if (grid_step <= 0 || 100 % grid_step != 0) throw InvalidArgument("grid step must be a positive divisor of 100");
    std::vector<double> axis;
    for (int x = 0; x <= 100; x += grid_step) axis.push_back(static_cast<double>(x));
    return axis;
}

/// Samples every (p, v, g, h) grid tuple in lexicographic order (p slowest).
/// Point i uses noise stream i, so any subset or order reproduces the same rows.
inline std::vector<GridSample> collect_grid(const CollectOptions &opts = {}) {
    const auto axis = grid_axis(opts.grid_step);
    const std::size_t n = axis.size();
    std::vector<GridSample> out;
    out.reserve(n * n * n * n);
    std::uint64_t index = 0;
    for (double p : axis)
        for (double v : axis)
            for (double g : axis)
                for (double h : axis) {
                    const double y = measure_operating_point(p, {v, g, h}, {opts.seed, index++, opts.noise});
                    out.push_back({p, v, g, h, y});
                }
    return out;
}

}  // namespace qbandit
