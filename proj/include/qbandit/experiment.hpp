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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "qbandit/errors.hpp"
#include "qbandit/hypercube.hpp"
#include "qbandit/optimize.hpp"
#include "qbandit/pipeline.hpp"
#include "qbandit/reward_model.hpp"
#include "qbandit/serialization.hpp"
#include "qbandit/training.hpp"

namespace qbandit {

/// Everything one sweep entry fixes: model architecture, training schedule and
/// data handling. Parsed from a flat JSON object whose keys match the hypercube
/// axis names.
struct ExperimentSpec {
    std::variant<VqcConfig, MlpConfig> model;
    TrainConfig train;
    PreprocessOptions preprocess;

    bool is_quantum() const { return std::holds_alternative<VqcConfig>(model); }
};

namespace detail {

inline const std::set<std::string> &known_spec_keys() {
    static const std::set<std::string> keys{
        "model",      "circuit",     "layers",     "parallel_encoding", "output_scaling", "hidden_size",
        "activation", "batch_size",  "loss",       "optimizer",         "input_range",    "output_range",
        "stratify",   "sample_weighting", "log_scaling", "learning_rate", "lr_factor",   "lr_patience",
        "max_epochs", "early_stop_patience", "min_delta"};
    return keys;
}

}  // namespace detail

inline ExperimentSpec parse_experiment_spec(const json &j) {
    if (!j.is_object()) throw InvalidArgument("experiment config must be a JSON object");
    for (const auto &[k, v] : j.items())
        if (!detail::known_spec_keys().count(k)) throw InvalidArgument("unknown config key '" + k + "'");
    ExperimentSpec s;
    const auto kind = j.at("model").get<std::string>();
    if (kind == "vqc") {
        VqcConfig c;
        const int circuit = j.at("circuit").get<int>();
        if (circuit != 1 && circuit != 2) throw InvalidArgument("circuit must be 1 or 2");
        c.ansatz = circuit == 1 ? Ansatz::Circuit1 : Ansatz::Circuit2;
        c.n_layers = j.at("layers").get<int>();
        c.parallel_encoding = j.value("parallel_encoding", false);
        c.output_scaling = j.value("output_scaling", false);
        c.validate();
        s.model = c;
    } else if (kind == "mlp") {
        MlpConfig c;
        c.n_layers = j.at("layers").get<int>();
        c.hidden_size = j.at("hidden_size").get<int>();
        c.activation = activation_from_string(j.value("activation", "relu"));
        c.validate();
        s.model = c;
    } else {
        throw InvalidArgument("model must be 'vqc' or 'mlp'");
    }
    auto &t = s.train;
    t.batch_size = j.value("batch_size", 32);
    const auto loss = j.value("loss", "mse");
    if (loss != "mse" && loss != "mae") throw InvalidArgument("loss must be 'mse' or 'mae'");
    t.loss = loss == "mse" ? LossKind::Mse : LossKind::Mae;
    const auto opt = j.value("optimizer", "adam");
    if (opt != "adam" && opt != "sgd") throw InvalidArgument("optimizer must be 'adam' or 'sgd'");
    t.optimizer = opt == "adam" ? OptimizerKind::Adam : OptimizerKind::Sgd;
    t.learning_rate = j.value("learning_rate", t.learning_rate);
    t.lr_factor = j.value("lr_factor", t.lr_factor);
    t.lr_patience = j.value("lr_patience", t.lr_patience);
    t.max_epochs = j.value("max_epochs", t.max_epochs);
    t.early_stop_patience = j.value("early_stop_patience", t.early_stop_patience);
    t.min_delta = j.value("min_delta", t.min_delta);
    t.validate();
    auto &p = s.preprocess;
    if (j.contains("input_range")) {
        const auto r = j.at("input_range").get<std::array<double, 2>>();
        if (!(r[1] > r[0])) throw InvalidArgument("input_range must be increasing");
        p.input_range = {r[0], r[1]};
    }
    if (j.contains("output_range")) {
        const auto r = j.at("output_range").get<std::array<double, 2>>();
        if (r[0] != Preprocessor::kTargetLo || r[1] != Preprocessor::kTargetHi)
            throw InvalidArgument("only output_range [-0.5, 0.5] is supported");
    }
    p.stratify = j.value("stratify", false);
    p.sample_weighting = j.value("sample_weighting", false);
    p.log_scaling = j.value("log_scaling", true);
    return s;
}

/// Hex digest of the canonical (key-sorted, compact) config text.
inline std::string config_hash(const json &config) { return fnv1a_hex(config.dump()); }

inline RewardModel initial_model(const ExperimentSpec &spec, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x494E4954ULL));
    if (const auto *v = std::get_if<VqcConfig>(&spec.model)) return VqcModel::initialized(*v, rng);
    return MlpModel::initialized(std::get<MlpConfig>(spec.model), rng);
}

inline std::size_t count_params(const ExperimentSpec &spec) {
    return std::visit([](const auto &c) { return count_params(c); }, spec.model);
}

struct ExperimentOptions {
    std::uint64_t seed = 0;        // model init and batch order
    std::uint64_t split_seed = 0;  // data split, shared across repeats
    bool with_rog = false;
    OptimizeOptions optimize;  // fixed evaluation seed so ROG varies only with training
};

struct ExperimentRecord {
    json config;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::uint64_t split_seed = 0;
    std::size_t n_params = 0;
    json checkpoint;
    json preprocessor;
    TrainHistory history;
    double val_mse = 0.0;
    double test_mse = 0.0;
    std::vector<OptimizationResult> results;
    std::optional<double> rog;
    double wall_seconds = 0.0;  // not part of the persisted record

    bool failed() const { return history.failed; }
};

inline json to_json(const ExperimentRecord &r) {
    json results = json::array();
    for (const auto &x : r.results) results.push_back(to_json(x));
    json j = {{"config", r.config},
              {"config_hash", r.config_hash},
              {"seed", r.seed},
              {"split_seed", r.split_seed},
              {"n_params", r.n_params},
              {"checkpoint", r.checkpoint},
              {"preprocessor", r.preprocessor},
              {"history", to_json(r.history)},
              {"val_mse", r.val_mse},
              {"test_mse", r.test_mse},
              {"results", results},
              {"failed", r.failed()}};
    j["rog"] = r.rog ? json(*r.rog) : json(nullptr);
    return j;
}

inline ExperimentRecord record_from_json(const json &j) {
    ExperimentRecord r;
    r.config = j.at("config");
    r.config_hash = j.at("config_hash").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.split_seed = j.at("split_seed").get<std::uint64_t>();
    r.n_params = j.at("n_params").get<std::size_t>();
    r.checkpoint = j.at("checkpoint");
    r.preprocessor = j.at("preprocessor");
    r.history = history_from_json(j.at("history"));
    r.val_mse = j.at("val_mse").get<double>();
    r.test_mse = j.at("test_mse").get<double>();
    for (const auto &x : j.at("results")) r.results.push_back(optimization_result_from_json(x));
    if (!j.at("rog").is_null()) r.rog = j.at("rog").get<double>();
    r.wall_seconds = j.value("wall_seconds", 0.0);
    return r;
}

/// Trains one configuration end to end and, when requested, runs the PSO +
/// ground-truth pipeline over the dataset's setpoints.
inline ExperimentRecord run_experiment(const json &config, std::span<const GridSample> dataset,
                                       const ExperimentOptions &opts) {
    const auto start = std::chrono::steady_clock::now();
    const ExperimentSpec spec = parse_experiment_spec(config);
    ExperimentRecord rec;
    rec.config = config;
    rec.config_hash = config_hash(config);
    rec.seed = opts.seed;
    rec.split_seed = opts.split_seed;
    rec.n_params = count_params(spec);

    const PreparedData prepared = prepare(dataset, spec.preprocess, opts.split_seed);
    RewardModel model = initial_model(spec, opts.seed);
    TrainConfig tc = spec.train;
    tc.seed = derive_seed(opts.seed, 0x545241494EULL);
    rec.history = train(model, prepared.data, tc);
    rec.checkpoint = checkpoint_to_json(model);
    rec.preprocessor = to_json(prepared.preprocessor);
    rec.val_mse = evaluate_mse(model, prepared.data.validation);
    rec.test_mse = evaluate_mse(model, prepared.data.test);
    if (opts.with_rog && !rec.failed()) {
        const auto setpoints = dataset_setpoints(dataset);
        rec.results = optimize_setpoints(model, prepared.preprocessor, dataset, setpoints, opts.optimize);
        rec.rog = rog(rec.results, setpoints);
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

enum class SelectionMetric { ValMseMin, RogMax };

/// Best-first ranking. Failed records (and, for ROG, records without one) sort
/// last; ties break on config hash, then seed.
inline std::vector<ExperimentRecord> select_top_k(std::vector<ExperimentRecord> records, SelectionMetric metric,
                                                  std::size_t k = 10) {
    auto key = [metric](const ExperimentRecord &r) {
        if (r.failed()) return std::numeric_limits<double>::infinity();
        if (metric == SelectionMetric::ValMseMin) return r.val_mse;
        return r.rog ? -*r.rog : std::numeric_limits<double>::infinity();
    };
    std::stable_sort(records.begin(), records.end(), [&](const ExperimentRecord &a, const ExperimentRecord &b) {
        const double ka = key(a), kb = key(b);
        if (ka != kb) return ka < kb;
        if (a.config_hash != b.config_hash) return a.config_hash < b.config_hash;
        return a.seed < b.seed;
    });
    if (records.size() > k) records.resize(k);
    return records;
}

struct Stat {
    double mean = 0.0;
    double std = 0.0;  // population
};

inline Stat mean_std(std::span<const double> xs) {
    Stat s;
    if (xs.empty()) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(v / static_cast<double>(xs.size()));
    return s;
}

struct RepeatSummary {
    std::vector<ExperimentRecord> records;
    std::vector<std::uint64_t> failed_seeds;
    Stat val_mse, test_mse, rog, seconds;
};

inline std::uint64_t repeat_seed(std::uint64_t base_seed, std::size_t i) { return derive_seed(base_seed, 0x524550ULL, i); }

/// Retrains one configuration with n derived seeds; failed runs are reported
/// and left out of the statistics.
inline RepeatSummary repeat_train(const json &config, std::span<const GridSample> dataset, std::size_t n_seeds,
                                  std::uint64_t base_seed, ExperimentOptions opts) {
    RepeatSummary out;
    std::vector<double> val, test, rogs, secs;
    for (std::size_t i = 0; i < n_seeds; ++i) {
        opts.seed = repeat_seed(base_seed, i);
        auto rec = run_experiment(config, dataset, opts);
        if (rec.failed()) {
            out.failed_seeds.push_back(rec.seed);
        } else {
            val.push_back(rec.val_mse);
            test.push_back(rec.test_mse);
            if (rec.rog) rogs.push_back(*rec.rog);
            secs.push_back(rec.wall_seconds);
        }
        out.records.push_back(std::move(rec));
    }
    out.val_mse = mean_std(val);
    out.test_mse = mean_std(test);
    out.rog = mean_std(rogs);
    out.seconds = mean_std(secs);
    return out;
}

struct SweepOptions {
    ExperimentOptions experiment;
    unsigned workers = 1;
};

/// Runs every grid entry of the cube. Jobs are independent; `on_record` is
/// called under a lock as each job completes. The returned vector is in grid order.
template <class OnRecord>
std::vector<ExperimentRecord> run_sweep(const HypercubeSpec &cube, std::span<const GridSample> dataset,
                                        const SweepOptions &opts, OnRecord &&on_record) {
    const auto configs = expand_grid(cube);
    for (const auto &c : configs) parse_experiment_spec(c);
    std::vector<ExperimentRecord> records(configs.size());
    std::mutex lock;
    std::size_t next = 0;
    std::exception_ptr error;
    auto worker = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard g(lock);
                if (next >= configs.size() || error) return;
                i = next++;
            }
            try {
                auto rec = run_experiment(configs[i], dataset, opts.experiment);
                std::lock_guard g(lock);
                on_record(i, rec);
                records[i] = std::move(rec);
            } catch (...) {
                std::lock_guard g(lock);
                if (!error) error = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1U, opts.workers);
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto &t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return records;
}

}  // namespace qbandit
