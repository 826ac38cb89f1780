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
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "qbandit/errors.hpp"
#include "qbandit/optimizers.hpp"
#include "qbandit/pipeline.hpp"
#include "qbandit/random.hpp"
#include "qbandit/reward_model.hpp"

namespace qbandit {

enum class LossKind { Mse, Mae };

inline const char *to_string(LossKind k) { return k == LossKind::Mse ? "mse" : "mae"; }

struct TrainConfig {
    double learning_rate = 0.01;
    double lr_factor = 0.5;
    int lr_patience = 7;
    int max_epochs = 100;
    int early_stop_patience = 10;
    int batch_size = 32;
    LossKind loss = LossKind::Mse;
    OptimizerKind optimizer = OptimizerKind::Adam;
    /// An epoch improves only if val loss < best - min_delta.
    double min_delta = 1e-8;
    std::uint64_t seed = 0;

    void validate() const {
        if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
        if (max_epochs < 0) throw InvalidArgument("max_epochs must be >= 0");
        if (max_epochs > 0 && (lr_patience >= max_epochs || early_stop_patience >= max_epochs))
            throw InvalidArgument("patience values must be below max_epochs");
        if (!(learning_rate > 0.0) || !(lr_factor > 0.0 && lr_factor <= 1.0))
            throw InvalidArgument("learning rate and factor must be positive");
    }
};

struct EpochRecord {
    int epoch;  // 1-based
    double train_loss;
    double val_loss;
    double learning_rate;  // rate used during this epoch
    bool improved;
};

struct TrainHistory {
    double initial_val_loss = 0.0;
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;  // 0 means the initial weights were kept
    double best_val_loss = 0.0;
    int lr_reductions = 0;
    bool stopped_early = false;
    bool failed = false;
    int failed_epoch = 0;
    std::string failure;
};

inline double pointwise_loss(LossKind kind, double prediction, double target) {
    const double r = prediction - target;
    return kind == LossKind::Mse ? r * r : std::abs(r);
}

inline double pointwise_loss_derivative(LossKind kind, double prediction, double target) {
    const double r = prediction - target;
    if (kind == LossKind::Mse) return 2.0 * r;
    return r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
}

/// Unweighted mean loss of `model` over `examples`.
inline double evaluate_loss(const RewardModel &model, std::span<const Example> examples, LossKind kind) {
    if (examples.empty()) return 0.0;
    double s = 0.0;
    for (const auto &e : examples) s += pointwise_loss(kind, model.predict(e.x), e.y);
    return s / static_cast<double>(examples.size());
}

inline double evaluate_mse(const RewardModel &model, std::span<const Example> examples) {
    return evaluate_loss(model, examples, LossKind::Mse);
}

/// Mini-batch training with seeded per-epoch shuffling, plateau learning-rate
/// decay, early stopping and restoration of the best validation weights.
/// The batch loss is mean(w_i * loss_i). When the validation split is empty,
/// the training split is monitored instead.
inline TrainHistory train(RewardModel &model, const SplitDataset &data, const TrainConfig &config) {
    config.validate();
    if (data.train.empty()) throw InvalidArgument("training split is empty");
    const std::span<const Example> monitor = data.validation.empty() ? std::span<const Example>(data.train)
                                                                     : std::span<const Example>(data.validation);
    TrainHistory h;
    GradientOptimizer opt(config.optimizer, model.size(), config.learning_rate);
    h.initial_val_loss = evaluate_loss(model, monitor, config.loss);
    h.best_val_loss = h.initial_val_loss;
    std::vector<double> best(model.flat().begin(), model.flat().end());

    std::vector<std::size_t> order(data.train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> grad(model.size()), sample_grad(model.size());
    int wait_stop = 0;
    int wait_lr = 0;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        Rng rng(derive_seed(config.seed, 0x45504FULL, static_cast<std::uint64_t>(epoch)));
        rng.shuffle(std::span(order));
        const double lr_used = opt.learning_rate();
        double epoch_loss = 0.0;
        try {
            for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
                const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
                const double inv_b = 1.0 / static_cast<double>(end - start);
                std::fill(grad.begin(), grad.end(), 0.0);
                for (std::size_t k = start; k < end; ++k) {
                    const Example &e = data.train[order[k]];
                    std::fill(sample_grad.begin(), sample_grad.end(), 0.0);
                    const double f = model.accumulate_gradient(e.x, 1.0, sample_grad);
                    epoch_loss += e.weight * pointwise_loss(config.loss, f, e.y);
                    const double c = e.weight * pointwise_loss_derivative(config.loss, f, e.y) * inv_b;
                    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += c * sample_grad[i];
                }
                opt.step(model.flat(), grad);
            }
        } catch (const NumericFailure &err) {
            h.failed = true;
            h.failed_epoch = epoch;
            h.failure = err.what();
            break;
        }
        epoch_loss /= static_cast<double>(order.size());
        const double val = evaluate_loss(model, monitor, config.loss);
        if (!std::isfinite(epoch_loss) || !std::isfinite(val)) {
            h.failed = true;
            h.failed_epoch = epoch;
            h.failure = "non-finite loss";
            break;
        }
        const bool improved = val < h.best_val_loss - config.min_delta;
        h.epochs.push_back({epoch, epoch_loss, val, lr_used, improved});
        if (improved) {
            h.best_val_loss = val;
            h.best_epoch = epoch;
            std::copy(model.flat().begin(), model.flat().end(), best.begin());
            wait_stop = 0;
            wait_lr = 0;
            continue;
        }
        if (++wait_stop >= config.early_stop_patience) {
            h.stopped_early = true;
            break;
        }
        if (++wait_lr >= config.lr_patience) {
            opt.set_learning_rate(opt.learning_rate() * config.lr_factor);
            ++h.lr_reductions;
            wait_lr = 0;
        }
    }
    std::copy(best.begin(), best.end(), model.flat().begin());
    return h;
}

}  // namespace qbandit
