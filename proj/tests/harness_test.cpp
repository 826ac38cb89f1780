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

#include "qbandit/qbandit.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace qbandit;
using nlohmann::json;

namespace {

const std::string kSourceDir = QBANDIT_SOURCE_DIR;

const std::vector<GridSample> &small_grid() {
    static const auto data = collect_grid({.seed = 1, .grid_step = 25});
    return data;
}

SplitDataset sine_data(int n_features, std::uint64_t seed) {
    Rng rng(seed);
    SplitDataset d;
    for (int i = 0; i < 200; ++i) {
        const double x = rng.uniform(-1, 1);
        d.train.push_back({std::vector<double>(n_features, x), 0.4 * std::sin(std::numbers::pi * x)});
    }
    for (int i = 0; i < 50; ++i) {
        const double x = rng.uniform(-1, 1);
        d.validation.push_back({std::vector<double>(n_features, x), 0.4 * std::sin(std::numbers::pi * x)});
    }
    return d;
}

ExperimentRecord fake_record(const std::string &hash, std::uint64_t seed, double val, std::optional<double> r = {},
                             bool failed = false) {
    ExperimentRecord rec;
    rec.config_hash = hash;
    rec.seed = seed;
    rec.val_mse = val;
    rec.rog = r;
    rec.history.failed = failed;
    return rec;
}

json tiny_mlp_config() {
    return {{"model", "mlp"}, {"layers", 1}, {"hidden_size", 8}, {"activation", "tanh"}, {"max_epochs", 12}};
}

}  // namespace

TEST(Train, memorizes_a_single_sample) {
    Rng rng(0);
    RewardModel m(MlpModel::initialized(MlpConfig{1, 40, Activation::Tanh}, rng));
    SplitDataset d;
    d.train.push_back({{0.3, -0.2, 0.7, 0.1}, 0.25});
    TrainConfig tc;
    tc.max_epochs = 500;
    tc.early_stop_patience = 499;  // one step per epoch makes Adam overshoot for a while
    const auto h = train(m, d, tc);
    EXPECT_FALSE(h.failed);
    EXPECT_LT(evaluate_mse(m, d.train), 1e-6);
}

TEST(Train, zero_epochs_keeps_initial_weights) {
    Rng rng(1);
    RewardModel m(MlpModel::initialized(MlpConfig{2, 8, Activation::Relu}, rng));
    const std::vector<double> before(m.flat().begin(), m.flat().end());
    const auto prep = prepare(small_grid(), {}, 0);
    TrainConfig tc;
    tc.max_epochs = 0;
    const auto h = train(m, prep.data, tc);
    EXPECT_TRUE(h.epochs.empty());
    EXPECT_EQ(h.best_epoch, 0);
    EXPECT_EQ(h.best_val_loss, h.initial_val_loss);
    EXPECT_EQ(h.initial_val_loss, evaluate_mse(m, prep.data.validation));
    EXPECT_TRUE(std::equal(before.begin(), before.end(), m.flat().begin()));
}

TEST(Train, single_qubit_reuploading_fits_a_sine) {
    VqcConfig c;
    c.ansatz = Ansatz::Circuit1;
    c.n_layers = 3;
    c.n_features = 1;
    ASSERT_EQ(c.n_qubits(), 1);
    Rng rng(3);
    RewardModel m(VqcModel::initialized(c, rng));
    const auto d = sine_data(1, 3);
    TrainConfig tc;
    tc.max_epochs = 200;
    tc.seed = 3;
    const auto h = train(m, d, tc);
    EXPECT_FALSE(h.failed);
    EXPECT_LT(evaluate_mse(m, d.train), 1e-3);
}

TEST(Train, schedule_early_stop_and_restore_invariants) {
    const auto prep = prepare(collect_grid({.seed = 2, .grid_step = 20}), {{-1, 1}, true, true, true}, 4);
    int plateaus = 0, early = 0;
    for (auto opt : {OptimizerKind::Adam, OptimizerKind::Sgd}) {
        for (auto loss : {LossKind::Mse, LossKind::Mae}) {
            Rng rng(8);
            RewardModel m(MlpModel::initialized(MlpConfig{1, 16, Activation::Tanh}, rng));
            TrainConfig tc;
            tc.optimizer = opt;
            tc.loss = loss;
            tc.max_epochs = 100;
            tc.learning_rate = opt == OptimizerKind::Adam ? 0.05 : 0.01;  // noisy enough to plateau
            const auto h = train(m, prep.data, tc);
            ASSERT_FALSE(h.failed);
            ASSERT_FALSE(h.epochs.empty());

            // replay the patience counters from the recorded curve
            double best = h.initial_val_loss;
            int wait_lr = 0, wait_stop = 0, halvings = 0, best_epoch = 0;
            for (const auto &e : h.epochs) {
                EXPECT_DOUBLE_EQ(e.learning_rate, tc.learning_rate * std::pow(0.5, halvings));
                const bool improved = e.val_loss < best - tc.min_delta;
                EXPECT_EQ(improved, e.improved) << e.epoch;
                if (improved) {
                    best = e.val_loss;
                    best_epoch = e.epoch;
                    wait_lr = wait_stop = 0;
                    continue;
                }
                if (++wait_stop >= tc.early_stop_patience) break;
                if (++wait_lr >= tc.lr_patience) {
                    ++halvings;
                    wait_lr = 0;
                }
            }
            EXPECT_EQ(h.best_epoch, best_epoch);
            EXPECT_EQ(h.best_val_loss, best);
            EXPECT_EQ(h.lr_reductions, halvings);
            EXPECT_EQ(h.stopped_early, wait_stop >= tc.early_stop_patience);
            if (h.stopped_early) {
                EXPECT_LT(static_cast<int>(h.epochs.size()), tc.max_epochs);
            }
            for (const auto &e : h.epochs) {
                if (e.epoch < h.best_epoch && !e.improved) {
                    EXPECT_LT(h.best_val_loss, e.val_loss);
                }
            }
            EXPECT_NEAR(evaluate_loss(m, prep.data.validation, loss), h.best_val_loss, 1e-12);
            plateaus += h.lr_reductions;
            early += h.stopped_early;
        }
    }
    EXPECT_GT(plateaus, 0);
    EXPECT_GT(early, 0);
}

TEST(Train, divergence_marks_the_record_failed) {
    Rng rng(2);
    MlpModel mlp = MlpModel::initialized(MlpConfig{1, 4, Activation::Relu}, rng);
    mlp.flat()[0] = std::numeric_limits<double>::quiet_NaN();
    RewardModel m(mlp);
    SplitDataset d;
    d.train.push_back({{1, 1, 1, 1}, 0.1});
    TrainConfig tc;
    tc.max_epochs = 20;
    const auto h = train(m, d, tc);
    EXPECT_TRUE(h.failed);
    EXPECT_EQ(h.failed_epoch, 1);
    EXPECT_FALSE(h.failure.empty());
}

TEST(Train, config_validation) {
    TrainConfig tc;
    tc.batch_size = 0;
    EXPECT_THROW(tc.validate(), InvalidArgument);
    tc = {};
    tc.max_epochs = 5;
    EXPECT_THROW(tc.validate(), InvalidArgument);
    RewardModel m(MlpModel(MlpConfig{}));
    EXPECT_THROW(train(m, SplitDataset{}, TrainConfig{}), InvalidArgument);
}

TEST(Train, seeded_training_is_deterministic) {
    const auto prep = prepare(small_grid(), {}, 0);
    auto run = [&] {
        Rng rng(4);
        RewardModel m(MlpModel::initialized(MlpConfig{1, 8, Activation::Sin}, rng));
        TrainConfig tc;
        tc.max_epochs = 15;
        tc.seed = 9;
        train(m, prep.data, tc);
        return std::vector<double>(m.flat().begin(), m.flat().end());
    };
    EXPECT_EQ(run(), run());
}

TEST(Hypercube, shipped_cubes) {
    const auto quantum = HypercubeSpec::from_json(read_json(kSourceDir + "/cubes/quantum.json"));
    const auto qcfg = expand_grid(quantum);
    EXPECT_EQ(qcfg.size(), 1152u);
    for (const auto &c : qcfg) EXPECT_NO_THROW(parse_experiment_spec(c));
    const auto classical = HypercubeSpec::from_json(read_json(kSourceDir + "/cubes/classical.json"));
    EXPECT_EQ(expand_grid(classical).size(), 2304u);
    EXPECT_EQ(expand_grid(HypercubeSpec::from_json(read_json(kSourceDir + "/cubes/classical_1152.json"))).size(), 1152u);
}

TEST(Hypercube, ordering_and_errors) {
    const auto one = HypercubeSpec::from_json(json::parse(R"({"axes":[{"name":"a","values":[1,2]}]})"));
    const auto g = expand_grid(one);
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g[0], json({{"a", 1}}));
    const auto two = HypercubeSpec::from_json(json::parse(R"({"axes":[{"name":"a","values":[1,2]},{"name":"b","values":["x","y","z"]}]})"));
    const auto g2 = expand_grid(two);
    ASSERT_EQ(g2.size(), 6u);
    EXPECT_EQ(g2[1], json({{"a", 1}, {"b", "y"}}));
    EXPECT_EQ(g2[3], json({{"a", 2}, {"b", "x"}}));
    EXPECT_EQ(HypercubeSpec::from_json(two.to_json()).to_json(), two.to_json());
    EXPECT_THROW(HypercubeSpec::from_json(json::parse(R"({"axes":[{"name":"a","values":[]}]})")), InvalidArgument);
    EXPECT_THROW(HypercubeSpec::from_json(json::parse(R"({"axes":[{"name":"a","values":[1]},{"name":"a","values":[2]}]})")),
                 InvalidArgument);
}

TEST(Experiment, spec_parsing) {
    auto c = tiny_mlp_config();
    EXPECT_EQ(count_params(parse_experiment_spec(c)), 49u);
    c["typo"] = 1;
    EXPECT_THROW(parse_experiment_spec(c), InvalidArgument);
    auto q = json{{"model", "vqc"}, {"circuit", 3}, {"layers", 2}};
    EXPECT_THROW(parse_experiment_spec(q), InvalidArgument);
    q["circuit"] = 1;
    q["output_range"] = {0.0, 1.0};
    EXPECT_THROW(parse_experiment_spec(q), InvalidArgument);
    q["output_range"] = {-0.5, 0.5};
    q["input_range"] = {0.0, 1.0};
    const auto s = parse_experiment_spec(q);
    EXPECT_EQ(s.preprocess.input_range, (InputRange{0, 1}));
    EXPECT_EQ(count_params(s), 2u * 12 + 2 * 4);
}

TEST(Experiment, config_hash_ignores_key_order) {
    const auto a = json::parse(R"({"model":"mlp","layers":1,"hidden_size":8})");
    const auto b = json::parse(R"({"hidden_size":8,"layers":1,"model":"mlp"})");
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_NE(config_hash(a), config_hash(tiny_mlp_config()));
    EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Experiment, record_round_trip_and_restore) {
    ExperimentOptions opts;
    opts.seed = 5;
    opts.split_seed = 6;
    opts.with_rog = true;
    opts.optimize.pso.budget = 80;
    opts.optimize.ground_truth.n_trajectories = 2;
    const auto rec = run_experiment(tiny_mlp_config(), small_grid(), opts);
    ASSERT_FALSE(rec.failed());
    ASSERT_TRUE(rec.rog.has_value());
    EXPECT_EQ(rec.results.size(), 5u);
    const auto back = record_from_json(to_json(rec));
    EXPECT_EQ(to_json(back), to_json(rec));
    EXPECT_EQ(back.rog, rec.rog);

    // checkpoint + preprocessor reproduce the recorded metrics bit for bit
    const auto model = checkpoint_from_json(json::parse(to_json(rec).dump()).at("checkpoint"));
    const auto pp = preprocessor_from_json(json::parse(rec.preprocessor.dump()));
    const auto spec = parse_experiment_spec(rec.config);
    const auto prep = prepare(small_grid(), spec.preprocess, opts.split_seed);
    EXPECT_EQ(evaluate_mse(model, prep.data.validation), rec.val_mse);
    EXPECT_EQ(to_json(pp), to_json(prep.preprocessor));
    for (const auto &r : rec.results) EXPECT_EQ(pso_optimize(model, pp, r.setpoint, [&] {
                                                    PsoConfig c = opts.optimize.pso;
                                                    std::size_t i = static_cast<std::size_t>(r.setpoint / 25);
                                                    c.seed = derive_seed(opts.optimize.pso.seed, i);
                                                    return c;
                                                }()).steering,
                                                r.pso);
    // rerun is identical
    EXPECT_EQ(to_json(run_experiment(tiny_mlp_config(), small_grid(), opts)), to_json(rec));
}

TEST(Serialization, checkpoint_is_bit_exact) {
    Rng rng(12);
    VqcConfig vc;
    vc.ansatz = Ansatz::Circuit2;
    vc.n_layers = 3;
    vc.output_scaling = true;
    for (const RewardModel &m : {RewardModel(VqcModel::initialized(vc, rng)),
                                 RewardModel(MlpModel::initialized(MlpConfig{2, 5, Activation::Sin}, rng))}) {
        const auto text = checkpoint_to_json(m).dump();
        const auto back = checkpoint_from_json(json::parse(text));
        EXPECT_EQ(back.kind(), m.kind());
        ASSERT_EQ(back.size(), m.size());
        EXPECT_TRUE(std::equal(m.flat().begin(), m.flat().end(), back.flat().begin()));
        const std::vector<double> x{0.1, -0.7, 0.33, 0.9};
        EXPECT_EQ(back.predict(x), m.predict(x));
    }
    auto bad = checkpoint_to_json(RewardModel(MlpModel(MlpConfig{})));
    bad["params"].erase(0);
    EXPECT_THROW(checkpoint_from_json(bad), InvalidData);
}

TEST(Serialization, dataset_csv_round_trip) {
    const auto &data = small_grid();
    const auto text = dataset_to_csv(data);
    EXPECT_EQ(text.substr(0, 10), "p,v,g,h,y\n");
    EXPECT_EQ(dataset_from_csv(text), data);
    EXPECT_THROW(dataset_from_csv("a,b\n1,2\n"), InvalidData);
    EXPECT_EQ(parse_double(format_double(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Selection, top_k_examples) {
    std::vector<ExperimentRecord> rs{fake_record("b", 0, 0.2), fake_record("a", 0, 0.1)};
    auto top = select_top_k(rs, SelectionMetric::ValMseMin, 10);
    ASSERT_EQ(top.size(), 2u);
    EXPECT_EQ(top[0].val_mse, 0.1);
    EXPECT_EQ(top[1].val_mse, 0.2);
    rs = {fake_record("c", 1, 0.5), fake_record("a", 2, 0.5), fake_record("b", 0, 0.5), fake_record("a", 1, 0.5)};
    top = select_top_k(rs, SelectionMetric::ValMseMin, 3);
    ASSERT_EQ(top.size(), 3u);
    EXPECT_EQ(top[0].config_hash + std::to_string(top[0].seed), "a1");
    EXPECT_EQ(top[1].config_hash + std::to_string(top[1].seed), "a2");
    EXPECT_EQ(top[2].config_hash, "b");
    rs = {fake_record("a", 0, 0.01, 3.0, true), fake_record("b", 0, 0.3, 1.0), fake_record("c", 0, 0.2, std::nullopt),
          fake_record("d", 0, 0.4, 2.0)};
    top = select_top_k(rs, SelectionMetric::RogMax);
    EXPECT_EQ(top[0].config_hash, "d");
    EXPECT_EQ(top[1].config_hash, "b");
    EXPECT_EQ(top[3].config_hash, "c");  // failed and missing both sort last, by hash
    EXPECT_EQ(top[2].config_hash, "a");
    top = select_top_k(rs, SelectionMetric::ValMseMin);
    EXPECT_EQ(top.back().config_hash, "a");
}

TEST(Repeat, statistics) {
    const std::vector<double> xs{1, 2, 3};
    const auto s = mean_std(xs);
    EXPECT_DOUBLE_EQ(s.mean, 2.0);
    EXPECT_DOUBLE_EQ(s.std, std::sqrt(2.0 / 3.0));
    const auto one = repeat_train(tiny_mlp_config(), small_grid(), 1, 7, {});
    ASSERT_EQ(one.records.size(), 1u);
    EXPECT_EQ(one.val_mse.std, 0.0);
    EXPECT_EQ(one.test_mse.std, 0.0);
    EXPECT_EQ(one.val_mse.mean, one.records[0].val_mse);
    const auto three = repeat_train(tiny_mlp_config(), small_grid(), 3, 7, {});
    EXPECT_EQ(to_json(three.records[0]), to_json(one.records[0]));
    EXPECT_NE(three.records[1].seed, three.records[0].seed);
    EXPECT_TRUE(three.failed_seeds.empty());
    // same split across repeats
    for (const auto &r : three.records) EXPECT_EQ(r.preprocessor, three.records[0].preprocessor);
}

TEST(Sweep, grid_order_and_reproducibility) {
    const auto cube = HypercubeSpec::from_json(read_json(kSourceDir + "/cubes/smoke.json"));
    SweepOptions so;
    so.experiment.seed = 3;
    std::vector<std::size_t> seen;
    const auto a = run_sweep(cube, small_grid(), so, [&](std::size_t i, const ExperimentRecord &) { seen.push_back(i); });
    so.workers = 3;
    const auto b = run_sweep(cube, small_grid(), so, [](std::size_t, const ExperimentRecord &) {});
    const auto grid = expand_grid(cube);
    ASSERT_EQ(a.size(), grid.size());
    EXPECT_EQ(seen.size(), grid.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].config, grid[i]);
        EXPECT_EQ(to_json(a[i]), to_json(b[i]));
    }
    const auto ra = select_top_k(a, SelectionMetric::ValMseMin), rb = select_top_k(b, SelectionMetric::ValMseMin);
    for (std::size_t i = 0; i < ra.size(); ++i) EXPECT_EQ(ra[i].config_hash, rb[i].config_hash);
    auto bad = cube;
    bad.axes.push_back({"nonsense", {json(1)}});
    EXPECT_THROW(run_sweep(bad, small_grid(), so, [](std::size_t, const ExperimentRecord &) {}), InvalidArgument);
}
