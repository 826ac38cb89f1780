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

// Command-line front end: collect, preprocess, train, sweep, optimize, evaluate, report.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qbandit/qbandit.hpp"

namespace fs = std::filesystem;
using namespace qbandit;

namespace {

fs::path results_dir() {
    if (const char *env = std::getenv("QBANDIT_RESULTS_DIR"); env && *env) return env;
    return ".";
}

std::string default_path(const std::string &given, const std::string &name) {
    if (!given.empty()) return given;
    const auto dir = results_dir();
    fs::create_directories(dir);
    return (dir / name).string();
}

OptimizeOptions optimize_options(std::uint64_t pso_seed, std::uint64_t eval_seed, int trajectories, bool noise) {
    OptimizeOptions o;
    o.pso.seed = pso_seed;
    o.ground_truth.seed = eval_seed;
    o.ground_truth.n_trajectories = trajectories;
    o.ground_truth.noise = noise;
    return o;
}

void write_record(const std::string &path, const ExperimentRecord &rec) {
    write_json(path, to_json(rec));
    // wall-clock time lives next to the record so the record itself stays reproducible
    write_json(path + ".timing.json", {{"config_hash", rec.config_hash}, {"wall_seconds", rec.wall_seconds}});
}

ExperimentRecord load_record(const fs::path &path) {
    auto rec = record_from_json(read_json(path.string()));
    const auto timing = path.string() + ".timing.json";
    if (fs::exists(timing)) rec.wall_seconds = read_json(timing).value("wall_seconds", 0.0);
    return rec;
}

json results_summary(std::span<const OptimizationResult> results, std::span<const double> setpoints,
                     const OptimizeOptions &o) {
    return {{"rog", rog(results, setpoints)},
            {"setpoints", setpoints},
            {"pso_seed", o.pso.seed},
            {"eval_seed", o.ground_truth.seed},
            {"n_trajectories", o.ground_truth.n_trajectories},
            {"swarm_size", o.pso.swarm_size},
            {"budget", o.pso.budget}};
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qbandit: reward-model learning and PSO steering on a synthetic industrial plant"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::uint64_t split_seed = 0;
    std::uint64_t eval_seed = 0;
    int trajectories = 1000;
    std::string data_path, out_path, config_path;

    // collect
    auto *collect = app.add_subcommand("collect", "sample the plant on the (p, v, g, h) grid into a dataset CSV");
    int grid_step = 10;
    bool noise_free = false;
    collect->add_option("--seed", seed, "noise seed");
    collect->add_option("--grid-step", grid_step, "grid spacing (divisor of 100)");
    collect->add_flag("--noise-free", noise_free, "disable reward noise");
    collect->add_option("-o,--out", out_path, "output CSV");

    // preprocess
    auto *preprocess = app.add_subcommand("preprocess", "fit and persist the preprocessor for a config");
    preprocess->add_option("--data", data_path, "dataset CSV")->required();
    preprocess->add_option("--config", config_path, "experiment config JSON")->required();
    preprocess->add_option("--seed", split_seed, "split seed");
    preprocess->add_option("-o,--out", out_path, "output JSON");

    // train
    auto *train_cmd = app.add_subcommand("train", "train one configuration into an experiment record");
    bool with_rog = false;
    train_cmd->add_option("--config", config_path, "experiment config JSON")->required();
    train_cmd->add_option("--data", data_path, "dataset CSV")->required();
    train_cmd->add_option("--seed", seed, "training seed");
    train_cmd->add_option("--split-seed", split_seed, "data split seed");
    train_cmd->add_flag("--with-rog", with_rog, "run PSO and ground-truth evaluation after training");
    train_cmd->add_option("--eval-seed", eval_seed, "PSO and ground-truth seed");
    train_cmd->add_option("--trajectories", trajectories, "ground-truth trajectories per candidate");
    train_cmd->add_option("-o,--out", out_path, "output record JSON");

    // sweep
    auto *sweep = app.add_subcommand("sweep", "train every configuration of a hypercube file");
    std::string cube_path, out_dir;
    unsigned workers = 1;
    std::size_t limit = 0;
    sweep->add_option("--cube", cube_path, "hypercube JSON")->required();
    sweep->add_option("--data", data_path, "dataset CSV")->required();
    sweep->add_option("--seed", seed, "training seed for every entry");
    sweep->add_option("--split-seed", split_seed, "data split seed");
    sweep->add_option("--workers", workers, "parallel jobs");
    sweep->add_option("--limit", limit, "only run the first N grid entries (0 = all)");
    sweep->add_flag("--with-rog", with_rog, "run PSO and ground-truth evaluation per entry");
    sweep->add_option("--eval-seed", eval_seed, "PSO and ground-truth seed");
    sweep->add_option("--trajectories", trajectories, "ground-truth trajectories per candidate");
    sweep->add_option("--out-dir", out_dir, "directory for records");

    // optimize
    auto *optimize = app.add_subcommand("optimize", "PSO over a trained model, with ground-truth comparison");
    std::string record_path, summary_path;
    optimize->add_option("--record", record_path, "experiment record JSON (checkpoint + preprocessor)")->required();
    optimize->add_option("--data", data_path, "dataset CSV")->required();
    optimize->add_option("--seed", seed, "PSO seed");
    optimize->add_option("--eval-seed", eval_seed, "ground-truth seed");
    optimize->add_option("--trajectories", trajectories, "ground-truth trajectories per candidate");
    optimize->add_option("-o,--out", out_path, "results CSV");
    optimize->add_option("--summary", summary_path, "summary JSON");

    // evaluate
    auto *evaluate = app.add_subcommand("evaluate", "ground-truth evaluation of steering configurations");
    std::string configs_path;
    bool eval_noise_free = false;
    evaluate->add_option("--configs", configs_path, "CSV with header p,v,g,h")->required();
    evaluate->add_option("--seed", seed, "ground-truth seed");
    evaluate->add_option("--trajectories", trajectories, "trajectories per configuration");
    evaluate->add_flag("--noise-free", eval_noise_free, "disable reward noise");
    evaluate->add_option("-o,--out", out_path, "output CSV");

    // report
    auto *report = app.add_subcommand("report", "summaries, loss curves, top-k tables and MSE-vs-ROG data");
    std::vector<std::string> record_inputs;
    std::size_t k = 10;
    report->add_option("--records", record_inputs, "record files or directories")->required();
    report->add_option("--k", k, "top-k size");
    report->add_option("--seed", seed, "unused; accepted for uniformity");
    report->add_option("--out-dir", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*collect) {
            const auto rows = collect_grid({seed, grid_step, !noise_free});
            const auto path = default_path(out_path, noise_free ? "dataset_noise_free.csv" : "dataset.csv");
            write_dataset(path, rows);
            std::cout << "wrote " << rows.size() << " samples to " << path << "\n";
        } else if (*preprocess) {
            const auto rows = read_dataset(data_path);
            const auto spec = parse_experiment_spec(read_json(config_path));
            const auto prepared = prepare(rows, spec.preprocess, split_seed);
            json j = to_json(prepared.preprocessor);
            j["split"] = {{"seed", split_seed},
                          {"train", prepared.indices.train.size()},
                          {"validation", prepared.indices.validation.size()},
                          {"test", prepared.indices.test.size()}};
            const auto path = default_path(out_path, "preprocessor.json");
            write_json(path, j);
            std::cout << "wrote " << path << "\n";
        } else if (*train_cmd) {
            const auto rows = read_dataset(data_path);
            ExperimentOptions o;
            o.seed = seed;
            o.split_seed = split_seed;
            o.with_rog = with_rog;
            o.optimize = optimize_options(eval_seed, eval_seed, trajectories, true);
            const auto rec = run_experiment(read_json(config_path), rows, o);
            const auto path = default_path(out_path, "record_" + rec.config_hash + ".json");
            write_record(path, rec);
            std::cout << "val_mse " << format_double(rec.val_mse) << " test_mse " << format_double(rec.test_mse);
            if (rec.rog) std::cout << " rog " << format_double(*rec.rog);
            std::cout << (rec.failed() ? " FAILED" : "") << "\nwrote " << path << "\n";
        } else if (*sweep) {
            const auto rows = read_dataset(data_path);
            auto cube = HypercubeSpec::from_json(read_json(cube_path));
            SweepOptions so;
            so.workers = workers;
            so.experiment.seed = seed;
            so.experiment.split_seed = split_seed;
            so.experiment.with_rog = with_rog;
            so.experiment.optimize = optimize_options(eval_seed, eval_seed, trajectories, true);
            const fs::path dir = out_dir.empty() ? results_dir() / "sweep" : fs::path(out_dir);
            fs::create_directories(dir);
            if (limit > 0) {
                // keep the grid order but stop after `limit` entries
                auto configs = expand_grid(cube);
                configs.resize(std::min(limit, configs.size()));
                for (std::size_t i = 0; i < configs.size(); ++i) {
                    auto rec = run_experiment(configs[i], rows, so.experiment);
                    write_record((dir / ("record_" + rec.config_hash + ".json")).string(), rec);
                    std::cout << "[" << i + 1 << "/" << configs.size() << "] " << rec.config_hash << "\n";
                }
            } else {
                const std::size_t total = cube.size();
                std::size_t done = 0;
                run_sweep(cube, rows, so, [&](std::size_t, const ExperimentRecord &rec) {
                    write_record((dir / ("record_" + rec.config_hash + ".json")).string(), rec);
                    std::cout << "[" << ++done << "/" << total << "] " << rec.config_hash << "\n";
                });
            }
        } else if (*optimize) {
            const auto rows = read_dataset(data_path);
            const auto rec = record_from_json(read_json(record_path));
            const auto model = checkpoint_from_json(rec.checkpoint);
            const auto pp = preprocessor_from_json(rec.preprocessor);
            const auto o = optimize_options(seed, eval_seed, trajectories, true);
            const auto setpoints = dataset_setpoints(rows);
            const auto results = optimize_setpoints(model, pp, rows, setpoints, o);
            const auto path = default_path(out_path, "optimization_results.csv");
            write_text(path, results_to_csv(results));
            const auto summary = results_summary(results, setpoints, o);
            write_json(summary_path.empty() ? path + ".summary.json" : summary_path, summary);
            std::cout << "rog " << format_double(summary["rog"].get<double>()) << "\nwrote " << path << "\n";
        } else if (*evaluate) {
            const auto text = read_text(configs_path);
            std::string out = "p,v,g,h,gt\n";
            std::size_t pos = 0;
            bool header = true;
            while (pos < text.size()) {
                auto nl = text.find('\n', pos);
                if (nl == std::string::npos) nl = text.size();
                std::string_view line(text.data() + pos, nl - pos);
                pos = nl + 1;
                if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
                if (line.empty()) continue;
                if (header) {
                    header = false;
                    continue;
                }
                const auto f = split_csv_line(line);
                if (f.size() < 4) throw InvalidData("configs row needs p,v,g,h");
                const double p = parse_double(f[0]);
                const Steering s{parse_double(f[1]), parse_double(f[2]), parse_double(f[3])};
                const double gt = ground_truth_eval(p, s, {trajectories, seed, !eval_noise_free});
                out += format_double(p) + ',' + format_double(s[0]) + ',' + format_double(s[1]) + ',' +
                       format_double(s[2]) + ',' + format_double(gt) + '\n';
            }
            const auto path = default_path(out_path, "ground_truth.csv");
            write_text(path, out);
            std::cout << "wrote " << path << "\n";
        } else if (*report) {
            std::vector<fs::path> files;
            for (const auto &in : record_inputs) {
                if (fs::is_directory(in)) {
                    for (const auto &e : fs::directory_iterator(in)) {
                        const auto name = e.path().filename().string();
                        if (e.path().extension() == ".json" && name.find(".timing.") == std::string::npos)
                            files.push_back(e.path());
                    }
                } else {
                    files.emplace_back(in);
                }
            }
            std::sort(files.begin(), files.end());
            std::vector<ExperimentRecord> records;
            for (const auto &f : files) records.push_back(load_record(f));
            if (records.empty()) throw InvalidArgument("no records found");
            const fs::path dir = out_dir.empty() ? results_dir() / "report" : fs::path(out_dir);
            fs::create_directories(dir);

            std::string summary = "config_hash,seed,model,n_params,wall_seconds,best_epoch,val_mse,test_mse,rog,failed\n";
            std::string curves = "config_hash,seed,epoch,train_loss,val_loss,learning_rate\n";
            std::string scatter = "config_hash,seed,model,n_params,val_mse,test_mse,rog\n";
            for (const auto &r : records) {
                const auto model = r.config.value("model", "?");
                const auto rog_text = r.rog ? format_double(*r.rog) : std::string();
                summary += r.config_hash + ',' + std::to_string(r.seed) + ',' + model + ',' + std::to_string(r.n_params) +
                           ',' + format_double(r.wall_seconds) + ',' + std::to_string(r.history.best_epoch) + ',' +
                           format_double(r.val_mse) + ',' + format_double(r.test_mse) + ',' + rog_text + ',' +
                           (r.failed() ? "1" : "0") + '\n';
                for (const auto &e : r.history.epochs)
                    curves += r.config_hash + ',' + std::to_string(r.seed) + ',' + std::to_string(e.epoch) + ',' +
                              format_double(e.train_loss) + ',' + format_double(e.val_loss) + ',' +
                              format_double(e.learning_rate) + '\n';
                if (r.rog && !r.failed())
                    scatter += r.config_hash + ',' + std::to_string(r.seed) + ',' + model + ',' +
                               std::to_string(r.n_params) + ',' + format_double(r.val_mse) + ',' +
                               format_double(r.test_mse) + ',' + rog_text + '\n';
            }
            write_text((dir / "summary.csv").string(), summary);
            write_text((dir / "loss_curves.csv").string(), curves);
            write_text((dir / "mse_vs_rog.csv").string(), scatter);

            auto table = [&](SelectionMetric m) {
                json arr = json::array();
                int rank = 1;
                for (const auto &r : select_top_k(records, m, k))
                    arr.push_back({{"rank", rank++},
                                   {"config_hash", r.config_hash},
                                   {"seed", r.seed},
                                   {"config", r.config},
                                   {"n_params", r.n_params},
                                   {"val_mse", r.val_mse},
                                   {"test_mse", r.test_mse},
                                   {"rog", r.rog ? json(*r.rog) : json(nullptr)},
                                   {"wall_seconds", r.wall_seconds}});
                return arr;
            };
            write_json((dir / "top_k.json").string(), {{"k", k}, {"val_mse_min", table(SelectionMetric::ValMseMin)},
                                                       {"rog_max", table(SelectionMetric::RogMax)}});
            std::cout << "reported " << records.size() << " records into " << dir.string() << "\n";
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
