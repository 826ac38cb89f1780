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
#include <bit>
#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <type_traits>
#include <vector>

#include "qbandit/errors.hpp"
#include "qbandit/pipeline.hpp"
#include "qbandit/plant.hpp"
#include "qbandit/pso.hpp"
#include "qbandit/reward_model.hpp"

namespace qbandit {

struct SurrogateOptimum {
    Steering steering;
    double predicted;  // model output, scaled target units
    int evaluations;
};

/// Maximizes surrogate(p, v, g, h) over (v, g, h) in the PSO box with the setpoint fixed.
template <class Surrogate>
    requires std::is_invocable_r_v<double, const Surrogate &, const Features &>
SurrogateOptimum pso_optimize(const Surrogate &surrogate, double setpoint, const PsoConfig &config) {
    const auto r = pso_maximize<3>([&](const Point<3> &s) { return surrogate(Features{setpoint, s[0], s[1], s[2]}); }, config);
    return {r.best, r.best_value, r.evaluations};
}

/// Model surrogate: raw candidates are scaled through the preprocessor before every model call.
inline SurrogateOptimum pso_optimize(const RewardModel &model, const Preprocessor &pp, double setpoint,
                                     const PsoConfig &config) {
    return pso_optimize([&](const Features &raw) { return model.predict(pp.scale(raw)); }, setpoint, config);
}

struct GroundTruthOptions {
    int n_trajectories = 1000;
    std::uint64_t seed = 0;
    bool noise = true;
};

/// Mean protocol reward of (p, v, g, h) over independent plant trajectories.
/// Trajectory t at setpoint p always draws the same noise stream, so candidates
/// compared at one setpoint share their noise realisations.
inline double ground_truth_eval(double p, const Steering &steering, const GroundTruthOptions &opts) {
    if (opts.n_trajectories < 1) throw InvalidArgument("n_trajectories must be >= 1");
    const std::uint64_t key = derive_seed(opts.seed, 0x4754ULL, std::bit_cast<std::uint64_t>(p));
    double sum = 0.0;
    for (int t = 0; t < opts.n_trajectories; ++t)
        sum += measure_operating_point(p, steering, {key, static_cast<std::uint64_t>(t), opts.noise});
    return sum / opts.n_trajectories;
}

/// Highest-y row at setpoint p; ties go to the lexicographically smallest (v, g, h).
inline Steering dataset_best(std::span<const GridSample> dataset, double p) {
    const GridSample *best = nullptr;
    for (const auto &s : dataset) {
        if (s.p != p) continue;
        if (!best || s.y > best->y ||
            (s.y == best->y && std::tie(s.v, s.g, s.h) < std::tie(best->v, best->g, best->h)))
            best = &s;
    }
    if (!best) throw InvalidArgument("dataset has no rows at setpoint " + std::to_string(p));
    return {best->v, best->g, best->h};
}

struct OptimizationResult {
    double setpoint;
    Steering pso;           // raw steering found by PSO
    double predicted;       // model value at `pso`, scaled units
    Steering dataset_best;  // best grid configuration in the dataset
    double gt_pso;
    double gt_db;

    double improvement() const { return gt_pso - gt_db; }
};

inline std::vector<double> default_setpoints() { return grid_axis(10); }

/// Sum over setpoints of GT_PSO(p) - GT_DB(p). Exactly one result per expected setpoint.
inline double rog(std::span<const OptimizationResult> results, std::span<const double> setpoints) {
    std::set<double> expected(setpoints.begin(), setpoints.end());
    if (expected.size() != setpoints.size()) throw ContractViolation("rog: duplicate expected setpoint");
    std::set<double> seen;
    double total = 0.0;
    for (const auto &r : results) {
        if (!expected.count(r.setpoint)) throw ContractViolation("rog: unexpected setpoint " + std::to_string(r.setpoint));
        if (!seen.insert(r.setpoint).second) throw ContractViolation("rog: duplicate setpoint " + std::to_string(r.setpoint));
        total += r.improvement();
    }
    if (seen.size() != expected.size()) throw ContractViolation("rog: missing setpoint");
    return total;
}

inline double rog(std::span<const OptimizationResult> results) {
    const auto p = default_setpoints();
    return rog(results, p);
}

/// Setpoints present in a dataset, ascending.
inline std::vector<double> dataset_setpoints(std::span<const GridSample> dataset) {
    std::set<double> ps;
    for (const auto &s : dataset) ps.insert(s.p);
    return {ps.begin(), ps.end()};
}

struct OptimizeOptions {
    PsoConfig pso;
    GroundTruthOptions ground_truth;
};

/// PSO on the surrogate plus ground-truth comparison against the dataset best, per setpoint.
inline std::vector<OptimizationResult> optimize_setpoints(const RewardModel &model, const Preprocessor &pp,
                                                          std::span<const GridSample> dataset,
                                                          std::span<const double> setpoints,
                                                          const OptimizeOptions &opts) {
    std::vector<OptimizationResult> out;
    out.reserve(setpoints.size());
    for (std::size_t i = 0; i < setpoints.size(); ++i) {
        const double p = setpoints[i];
        PsoConfig pc = opts.pso;
        pc.seed = derive_seed(opts.pso.seed, i);
        const auto cand = pso_optimize(model, pp, p, pc);
        OptimizationResult r;
        r.setpoint = p;
        r.pso = cand.steering;
        r.predicted = cand.predicted;
        r.dataset_best = dataset_best(dataset, p);
        r.gt_pso = ground_truth_eval(p, r.pso, opts.ground_truth);
        r.gt_db = ground_truth_eval(p, r.dataset_best, opts.ground_truth);
        if (!std::isfinite(r.gt_pso) || !std::isfinite(r.gt_db)) throw NumericFailure("non-finite ground truth", i);
        out.push_back(r);
    }
    return out;
}

}  // namespace qbandit
