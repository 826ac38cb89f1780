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
#include <functional>
#include <string>
#include <vector>

#include "qbandit/errors.hpp"
#include "qbandit/random.hpp"

namespace qbandit {

template <std::size_t D>
using Point = std::array<double, D>;

struct PsoConfig {
    int swarm_size = 40;
    int budget = 1000;  // objective evaluations
    double lower = 0.0;
    double upper = 100.0;
    double inertia = 0.729;
    double cognitive = 1.494;
    double social = 1.494;
    std::uint64_t seed = 0;

    void validate() const {
        if (swarm_size < 2) throw InvalidArgument("PSO swarm_size must be >= 2");
        if (budget < swarm_size) throw InvalidArgument("PSO budget must be >= swarm_size");
        if (!std::isfinite(lower) || !std::isfinite(upper) || !(upper > lower))
            throw InvalidArgument("PSO bounds must be finite with upper > lower");
    }
};

template <std::size_t D>
struct PsoResult {
    Point<D> best;
    double best_value;
    int evaluations;
};

/// Global-best PSO, maximizing. Positions start uniform in the box with zero
/// velocity; each move updates
///   vel <- w vel + c1 r1 (pbest - x) + c2 r2 (gbest - x),  x <- x + vel
/// with scalar r1, r2 ~ U(0, 1) drawn per particle and move, then clamps x to
/// the box, zeroing the velocity on clamped axes. Particles move in index order
/// and the global best is refreshed after every evaluation. Exactly `budget`
/// objective calls are made; a short last sweep moves only its leading particles.
template <std::size_t D, class Objective>
PsoResult<D> pso_maximize(Objective &&objective, const PsoConfig &config) {
    config.validate();
    Rng rng(derive_seed(config.seed, 0x50534FULL));
    const auto n = static_cast<std::size_t>(config.swarm_size);
    std::vector<Point<D>> x(n), vel(n), pbest(n);
    std::vector<double> pbest_value(n);
    int evals = 0;

    auto evaluate = [&](const Point<D> &p) {
        const double f = objective(p);
        ++evals;
        if (!std::isfinite(f)) throw NumericFailure("PSO objective returned a non-finite value", static_cast<std::size_t>(evals - 1));
        return f;
    };

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < D; ++d) {
            x[i][d] = rng.uniform(config.lower, config.upper);
            vel[i][d] = 0.0;
        }
    }
    Point<D> gbest{};
    double gbest_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        pbest[i] = x[i];
        pbest_value[i] = evaluate(x[i]);
        if (pbest_value[i] > gbest_value) {
            gbest_value = pbest_value[i];
            gbest = x[i];
        }
    }

    while (evals < config.budget) {
        const std::size_t movers = std::min<std::size_t>(n, static_cast<std::size_t>(config.budget - evals));
        for (std::size_t i = 0; i < movers; ++i) {
            const double r1 = rng.uniform();
            const double r2 = rng.uniform();
            for (std::size_t d = 0; d < D; ++d) {
                vel[i][d] = config.inertia * vel[i][d] + config.cognitive * r1 * (pbest[i][d] - x[i][d]) +
                            config.social * r2 * (gbest[d] - x[i][d]);
                x[i][d] += vel[i][d];
                if (x[i][d] < config.lower) {
                    x[i][d] = config.lower;
                    vel[i][d] = 0.0;
                } else if (x[i][d] > config.upper) {
                    x[i][d] = config.upper;
                    vel[i][d] = 0.0;
                }
            }
            const double f = evaluate(x[i]);
            if (f > pbest_value[i]) {
                pbest_value[i] = f;
                pbest[i] = x[i];
                if (f > gbest_value) {
                    gbest_value = f;
                    gbest = x[i];
                }
            }
        }
    }
    return {gbest, gbest_value, evals};
}

}  // namespace qbandit
