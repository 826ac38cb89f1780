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
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "qbandit/errors.hpp"
#include "qbandit/plant.hpp"
#include "qbandit/random.hpp"

namespace qbandit {

inline constexpr std::size_t kFeatures = 4;
using Features = std::array<double, kFeatures>;

struct InputRange {
    double lo = -1.0;
    double hi = 1.0;
    bool operator==(const InputRange &) const = default;
};

struct FeatureBounds {
    Features min{0.0, 0.0, 0.0, 0.0};
    Features max{100.0, 100.0, 100.0, 100.0};
    bool operator==(const FeatureBounds &) const = default;
};

/// x' = (x - min) / (max - min) * (b - a) + a, per feature.
inline Features scale_inputs(const Features &x, const InputRange &range, const FeatureBounds &bounds) {
    Features out;
    for (std::size_t j = 0; j < kFeatures; ++j) {
        const double span = bounds.max[j] - bounds.min[j];
        if (!(span > 0.0)) throw InvalidData("degenerate feature: max equals min");
        out[j] = (x[j] - bounds.min[j]) / span * (range.hi - range.lo) + range.lo;
    }
    return out;
}

/// sign(y) * ln(1 + |y|)
inline double sign_log(double y) { return std::copysign(std::log1p(std::abs(y)), y); }
inline double sign_log_inverse(double z) { return std::copysign(std::expm1(std::abs(z)), z); }

struct PreprocessOptions {
    InputRange input_range{-1.0, 1.0};
    bool stratify = false;
    bool sample_weighting = false;
    bool log_scaling = true;
    bool operator==(const PreprocessOptions &) const = default;
};

/// Fitted input/target scaling. Everything is fitted on the training split only.
class Preprocessor {
   public:
    static constexpr double kTargetLo = -0.5;
    static constexpr double kTargetHi = 0.5;

    Preprocessor() = default;

    /// Field-wise construction, used when loading a persisted preprocessor.
    Preprocessor(PreprocessOptions options, FeatureBounds bounds, double target_min, double target_max, double raw_min,
                 double raw_max)
        : options_(options), bounds_(bounds), target_min_(target_min), target_max_(target_max), raw_min_(raw_min),
          raw_max_(raw_max), fitted_(true) {}

    static Preprocessor fit(std::span<const GridSample> train, const PreprocessOptions &options) {
        if (train.empty()) throw InvalidData("cannot fit a preprocessor on an empty training set");
        Preprocessor pp;
        pp.options_ = options;
        pp.bounds_.min.fill(std::numeric_limits<double>::infinity());
        pp.bounds_.max.fill(-std::numeric_limits<double>::infinity());
        std::vector<double> ys;
        ys.reserve(train.size());
        for (const auto &s : train) {
            const auto x = s.x();
            for (std::size_t j = 0; j < kFeatures; ++j) {
                pp.bounds_.min[j] = std::min(pp.bounds_.min[j], x[j]);
                pp.bounds_.max[j] = std::max(pp.bounds_.max[j], x[j]);
            }
            ys.push_back(s.y);
        }
        for (std::size_t j = 0; j < kFeatures; ++j)
            if (!(pp.bounds_.max[j] > pp.bounds_.min[j])) throw InvalidData("degenerate feature in training data");
        pp.fit_targets(ys);
        return pp;
    }

    /// Fits only the target statistics (log-stage min/max and raw min/max).
    void fit_targets(std::span<const double> ys) {
        if (ys.empty()) throw InvalidData("cannot fit targets on an empty set");
        raw_min_ = std::numeric_limits<double>::infinity();
        raw_max_ = -std::numeric_limits<double>::infinity();
        for (double y : ys) {
            if (!std::isfinite(y)) throw InvalidData("non-finite target in training data");
            raw_min_ = std::min(raw_min_, y);
            raw_max_ = std::max(raw_max_, y);
        }
        target_min_ = log_stage(raw_min_);
        target_max_ = log_stage(raw_max_);
        fitted_ = true;
    }

    bool fitted() const noexcept { return fitted_; }
    const PreprocessOptions &options() const noexcept { return options_; }
    const FeatureBounds &bounds() const noexcept { return bounds_; }
    double target_min() const noexcept { return target_min_; }
    double target_max() const noexcept { return target_max_; }
    double raw_min() const noexcept { return raw_min_; }
    double raw_max() const noexcept { return raw_max_; }

    Features scale(const Features &raw) const {
        require_fitted();
        return scale_inputs(raw, options_.input_range, bounds_);
    }

    double log_stage(double y) const { return options_.log_scaling ? sign_log(y) : y; }

    /// Monotone increasing map into [-0.5, 0.5] on the training range;
    /// values outside it extrapolate linearly in log space.
    double transform_target(double y) const {
        require_fitted();
        if (!std::isfinite(y)) throw InvalidData("non-finite target");
        const double z = log_stage(y);
        const double span = target_max_ - target_min_;
        if (span == 0.0) return 0.0;
        return (z - target_min_) / span * (kTargetHi - kTargetLo) + kTargetLo;
    }

    double inverse_target(double t) const {
        require_fitted();
        const double z = (t - kTargetLo) / (kTargetHi - kTargetLo) * (target_max_ - target_min_) + target_min_;
        return options_.log_scaling ? sign_log_inverse(z) : z;
    }

    /// 1 + (y - y_min) / (y_max - y_min), in [1, 2] on the training range.
    double sample_weight(double y) const {
        require_fitted();
        const double span = raw_max_ - raw_min_;
        if (span == 0.0) return 1.0;
        return 1.0 + (y - raw_min_) / span;
    }

   private:
    void require_fitted() const {
        if (!fitted_) throw ContractViolation("preprocessor used before fitting");
    }

    PreprocessOptions options_;
    FeatureBounds bounds_;
    double target_min_ = 0.0;
    double target_max_ = 0.0;
    double raw_min_ = 0.0;
    double raw_max_ = 0.0;
    bool fitted_ = false;
};

/// Fits (when `fit`) and applies the target transform to a batch.
inline std::vector<double> transform_targets(std::span<const double> ys, Preprocessor &pp, bool fit) {
    if (fit) pp.fit_targets(ys);
    std::vector<double> out;
    out.reserve(ys.size());
    for (double y : ys) out.push_back(pp.transform_target(y));
    return out;
}

/// Sample weights from raw training targets.
inline std::vector<double> sample_weights(std::span<const double> ys) {
    if (ys.empty()) return {};
    const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
    const double span = *hi - *lo;
    std::vector<double> w;
    w.reserve(ys.size());
    for (double y : ys) w.push_back(span == 0.0 ? 1.0 : 1.0 + (y - *lo) / span);
    return w;
}

struct SplitIndices {
    std::vector<std::size_t> train, validation, test;
};

namespace detail {

/// Validation and test take floor(15%) each; train absorbs the remainder.
inline void split_group(std::vector<std::size_t> group, Rng &rng, SplitIndices &out) {
    rng.shuffle(std::span(group));
    const std::size_t n = group.size();
    const std::size_t n_val = n * 15 / 100;
    const std::size_t n_test = n * 15 / 100;
    const std::size_t n_train = n - n_val - n_test;
    out.train.insert(out.train.end(), group.begin(), group.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.validation.insert(out.validation.end(), group.begin() + static_cast<std::ptrdiff_t>(n_train),
                          group.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    out.test.insert(out.test.end(), group.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), group.end());
}

}  // namespace detail

/// Seeded 70/15/15 partition of dataset row indices. With `stratify`, the
/// proportions hold inside every setpoint stratum.
inline SplitIndices split_indices(std::span<const GridSample> dataset, std::uint64_t seed, bool stratify) {
    if (dataset.empty()) throw InvalidArgument("cannot split an empty dataset");
    Rng rng(derive_seed(seed, 0x53504C4954ULL));
    SplitIndices out;
    if (!stratify) {
        std::vector<std::size_t> all(dataset.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        detail::split_group(std::move(all), rng, out);
        return out;
    }
    std::map<double, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < dataset.size(); ++i) strata[dataset[i].p].push_back(i);
    for (auto &[p, group] : strata) detail::split_group(std::move(group), rng, out);
    return out;
}

struct Example {
    std::vector<double> x;  // scaled input
    double y;               // scaled target
    double weight = 1.0;    // 1 unless sample weighting is enabled
    bool operator==(const Example &) const = default;
};

struct SplitDataset {
    std::vector<Example> train, validation, test;
};

struct PreparedData {
    Preprocessor preprocessor;
    SplitIndices indices;
    SplitDataset data;
};

/// Split, fit the preprocessor on the training rows, then scale every split.
inline PreparedData prepare(std::span<const GridSample> dataset, const PreprocessOptions &options, std::uint64_t seed) {
    PreparedData out;
    out.indices = split_indices(dataset, seed, options.stratify);
    std::vector<GridSample> train_rows;
    train_rows.reserve(out.indices.train.size());
    for (auto i : out.indices.train) train_rows.push_back(dataset[i]);
    out.preprocessor = Preprocessor::fit(train_rows, options);
    const auto &pp = out.preprocessor;
    auto build = [&](const std::vector<std::size_t> &idx, bool weighted) {
        std::vector<Example> ex;
        ex.reserve(idx.size());
        for (auto i : idx) {
            const auto &s = dataset[i];
            const Features x = pp.scale(s.x());
            ex.push_back({{x.begin(), x.end()}, pp.transform_target(s.y), weighted ? pp.sample_weight(s.y) : 1.0});
        }
        return ex;
    };
    out.data.train = build(out.indices.train, options.sample_weighting);
    out.data.validation = build(out.indices.validation, false);
    out.data.test = build(out.indices.test, false);
    return out;
}

}  // namespace qbandit
