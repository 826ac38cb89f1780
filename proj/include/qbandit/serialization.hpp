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

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "qbandit/errors.hpp"
#include "qbandit/mlp.hpp"
#include "qbandit/optimize.hpp"
#include "qbandit/pipeline.hpp"
#include "qbandit/plant.hpp"
#include "qbandit/reward_model.hpp"
#include "qbandit/training.hpp"
#include "qbandit/vqc.hpp"

namespace qbandit {

using json = nlohmann::json;

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    if (r.ec != std::errc{}) throw InvalidData("cannot format double");
    return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double x = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw InvalidData("malformed number '" + std::string(s) + "'");
    return x;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::string read_text(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write '" + path + "'");
    out << text;
    if (!out) throw InvalidArgument("write failed for '" + path + "'");
}

inline json read_json(const std::string &path) { return json::parse(read_text(path)); }
inline void write_json(const std::string &path, const json &j) { write_text(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// Dataset CSV: header p,v,g,h,y

inline std::string dataset_to_csv(std::span<const GridSample> rows) {
    std::string out = "p,v,g,h,y\n";
    for (const auto &s : rows) {
        out += format_double(s.p) + ',' + format_double(s.v) + ',' + format_double(s.g) + ',' + format_double(s.h) +
               ',' + format_double(s.y) + '\n';
    }
    return out;
}

inline std::vector<GridSample> dataset_from_csv(std::string_view text) {
    std::vector<GridSample> rows;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (header) {
            if (line != "p,v,g,h,y") throw InvalidData("dataset header must be 'p,v,g,h,y'");
            header = false;
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 5) throw InvalidData("dataset row must have 5 fields");
        rows.push_back({parse_double(f[0]), parse_double(f[1]), parse_double(f[2]), parse_double(f[3]), parse_double(f[4])});
    }
    if (header) throw InvalidData("dataset file is empty");
    return rows;
}

inline void write_dataset(const std::string &path, std::span<const GridSample> rows) { write_text(path, dataset_to_csv(rows)); }
inline std::vector<GridSample> read_dataset(const std::string &path) { return dataset_from_csv(read_text(path)); }

// ---------------------------------------------------------------------------
// Model checkpoints: {"format": "qbandit-checkpoint", "model": tag, "config": {...}, "params": [...]}

inline constexpr const char *kCheckpointFormat = "qbandit-checkpoint";

inline json to_json(const VqcConfig &c) {
    return {{"ansatz", to_string(c.ansatz)},
            {"n_layers", c.n_layers},
            {"parallel_encoding", c.parallel_encoding},
            {"output_scaling", c.output_scaling},
            {"n_features", c.n_features}};
}

inline VqcConfig vqc_config_from_json(const json &j) {
    VqcConfig c;
    const auto tag = j.at("ansatz").get<std::string>();
    if (tag == "circuit1")
        c.ansatz = Ansatz::Circuit1;
    else if (tag == "circuit2")
        c.ansatz = Ansatz::Circuit2;
    else
        throw InvalidArgument("unsupported ansatz tag '" + tag + "'");
    c.n_layers = j.at("n_layers").get<int>();
    c.parallel_encoding = j.at("parallel_encoding").get<bool>();
    c.output_scaling = j.at("output_scaling").get<bool>();
    c.n_features = j.value("n_features", 4);
    c.validate();
    return c;
}

inline Activation activation_from_string(const std::string &s) {
    if (s == "relu") return Activation::Relu;
    if (s == "tanh") return Activation::Tanh;
    if (s == "sin") return Activation::Sin;
    throw InvalidArgument("unknown activation '" + s + "'");
}

inline json to_json(const MlpConfig &c) {
    return {{"n_layers", c.n_layers},
            {"hidden_size", c.hidden_size},
            {"activation", to_string(c.activation)},
            {"input_dim", c.input_dim},
            {"output_dim", c.output_dim}};
}

inline MlpConfig mlp_config_from_json(const json &j) {
    MlpConfig c;
    c.n_layers = j.at("n_layers").get<int>();
    c.hidden_size = j.at("hidden_size").get<int>();
    c.activation = activation_from_string(j.at("activation").get<std::string>());
    c.input_dim = j.value("input_dim", 4);
    c.output_dim = j.value("output_dim", 1);
    c.validate();
    return c;
}

inline json checkpoint_to_json(const RewardModel &model) {
    json j;
    j["format"] = kCheckpointFormat;
    j["version"] = 1;
    j["model"] = model.kind();
    j["config"] = model.vqc() ? to_json(model.vqc()->config()) : to_json(model.mlp()->config());
    const auto flat = model.flat();
    j["params"] = std::vector<double>(flat.begin(), flat.end());
    return j;
}

inline RewardModel checkpoint_from_json(const json &j) {
    if (j.value("format", "") != kCheckpointFormat) throw InvalidData("not a qbandit checkpoint");
    const auto params = j.at("params").get<std::vector<double>>();
    const auto tag = j.at("model").get<std::string>();
    auto load = [&](auto model) {
        if (model.size() != params.size()) throw InvalidData("checkpoint parameter count does not match its config");
        std::copy(params.begin(), params.end(), model.flat().begin());
        return RewardModel(std::move(model));
    };
    if (tag == "vqc") return load(VqcModel(vqc_config_from_json(j.at("config"))));
    if (tag == "mlp") return load(MlpModel(mlp_config_from_json(j.at("config"))));
    throw InvalidData("unknown model tag '" + tag + "'");
}

// ---------------------------------------------------------------------------
// Preprocessor

inline json to_json(const Preprocessor &pp) {
    const auto &o = pp.options();
    const auto &b = pp.bounds();
    return {{"input_range", {o.input_range.lo, o.input_range.hi}},
            {"output_range", {Preprocessor::kTargetLo, Preprocessor::kTargetHi}},
            {"stratify", o.stratify},
            {"sample_weighting", o.sample_weighting},
            {"log_scaling", o.log_scaling},
            {"feature_min", b.min},
            {"feature_max", b.max},
            {"target_min", pp.target_min()},
            {"target_max", pp.target_max()},
            {"raw_min", pp.raw_min()},
            {"raw_max", pp.raw_max()}};
}

inline Preprocessor preprocessor_from_json(const json &j) {
    PreprocessOptions o;
    const auto r = j.at("input_range").get<std::array<double, 2>>();
    o.input_range = {r[0], r[1]};
    o.stratify = j.at("stratify").get<bool>();
    o.sample_weighting = j.at("sample_weighting").get<bool>();
    o.log_scaling = j.at("log_scaling").get<bool>();
    FeatureBounds b{j.at("feature_min").get<Features>(), j.at("feature_max").get<Features>()};
    return Preprocessor(o, b, j.at("target_min").get<double>(), j.at("target_max").get<double>(),
                        j.at("raw_min").get<double>(), j.at("raw_max").get<double>());
}

// ---------------------------------------------------------------------------
// Training history and optimization results

inline json to_json(const TrainHistory &h) {
    json epochs = json::array();
    for (const auto &e : h.epochs)
        epochs.push_back({{"epoch", e.epoch},
                          {"train_loss", e.train_loss},
                          {"val_loss", e.val_loss},
                          {"learning_rate", e.learning_rate},
                          {"improved", e.improved}});
    json j = {{"initial_val_loss", h.initial_val_loss},
              {"epochs", epochs},
              {"best_epoch", h.best_epoch},
              {"best_val_loss", h.best_val_loss},
              {"lr_reductions", h.lr_reductions},
              {"stopped_early", h.stopped_early},
              {"failed", h.failed}};
    if (h.failed) {
        j["failed_epoch"] = h.failed_epoch;
        j["failure"] = h.failure;
    }
    return j;
}

inline TrainHistory history_from_json(const json &j) {
    TrainHistory h;
    h.initial_val_loss = j.at("initial_val_loss").get<double>();
    for (const auto &e : j.at("epochs"))
        h.epochs.push_back({e.at("epoch").get<int>(), e.at("train_loss").get<double>(), e.at("val_loss").get<double>(),
                            e.at("learning_rate").get<double>(), e.at("improved").get<bool>()});
    h.best_epoch = j.at("best_epoch").get<int>();
    h.best_val_loss = j.at("best_val_loss").get<double>();
    h.lr_reductions = j.at("lr_reductions").get<int>();
    h.stopped_early = j.at("stopped_early").get<bool>();
    h.failed = j.at("failed").get<bool>();
    h.failed_epoch = j.value("failed_epoch", 0);
    h.failure = j.value("failure", "");
    return h;
}

inline json to_json(const OptimizationResult &r) {
    return {{"p", r.setpoint},        {"pso", r.pso},     {"predicted", r.predicted}, {"dataset_best", r.dataset_best},
            {"gt_pso", r.gt_pso},     {"gt_db", r.gt_db}, {"improvement", r.improvement()}};
}

inline OptimizationResult optimization_result_from_json(const json &j) {
    OptimizationResult r;
    r.setpoint = j.at("p").get<double>();
    r.pso = j.at("pso").get<Steering>();
    r.predicted = j.at("predicted").get<double>();
    r.dataset_best = j.at("dataset_best").get<Steering>();
    r.gt_pso = j.at("gt_pso").get<double>();
    r.gt_db = j.at("gt_db").get<double>();
    return r;
}

/// Results CSV: p,v,g,h,predicted,gt_pso,gt_db,improvement
inline std::string results_to_csv(std::span<const OptimizationResult> results) {
    std::string out = "p,v,g,h,predicted,gt_pso,gt_db,improvement\n";
    for (const auto &r : results) {
        out += format_double(r.setpoint) + ',' + format_double(r.pso[0]) + ',' + format_double(r.pso[1]) + ',' +
               format_double(r.pso[2]) + ',' + format_double(r.predicted) + ',' + format_double(r.gt_pso) + ',' +
               format_double(r.gt_db) + ',' + format_double(r.improvement()) + '\n';
    }
    return out;
}

/// 64-bit FNV-1a of the text, as 16 hex digits.
inline std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << h;
    return ss.str();
}

}  // namespace qbandit
