#include "sobnn/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sobnn/experiment.hpp"
#include "sobnn/gradcheck.hpp"
#include "sobnn/problems.hpp"

namespace sobnn {

namespace {

struct CliOpts {
    std::string problem;
    std::string data_path;
    std::vector<std::size_t> layers{2, 5, 3, 3, 1};
    std::size_t points_per_axis = 25;
    std::string split = "stride2";  // stride2 | paper
    std::size_t epochs = 500;
    std::size_t batch_size = 64;
    double learn_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double schedule_rate = 0.01;
    std::uint64_t seed = 0;
    std::vector<int> modes;
    std::size_t runs = 20;
    std::size_t threads = 0;
    std::size_t checks = 20;
    bool keep_traces = false;
    bool preset_paper500 = false;
    std::string out = "";
};

NetworkShape shape_from(const CliOpts& o) {
    NetworkShape shape;
    shape.layer_sizes = o.layers;
    shape.validate();
    return shape;
}

TrainConfig train_config_from(const CliOpts& o) {
    TrainConfig tc;
    tc.shape = shape_from(o);
    tc.epochs = o.epochs;
    tc.batch_size = o.batch_size;
    tc.adam_theta = AdamConfig{o.learn_rate, o.beta1, o.beta2, o.adam_epsilon};
    tc.adam_lambda = tc.adam_theta;
    tc.schedule_rate = o.schedule_rate;
    tc.seed = o.seed;
    return tc;
}

// standardized train/validation pair plus protocol metadata
std::pair<std::pair<Dataset, Dataset>, ProtocolInfo> prepare_datasets(const CliOpts& o) {
    Dataset full;
    ProtocolInfo info;
    if (!o.problem.empty() && !o.data_path.empty()) {
        throw CLI::ValidationError("--problem and --data are mutually exclusive");
    }
    if (!o.problem.empty()) {
        full = sample_grid(builtin(o.problem), o.points_per_axis);
        info.source = o.problem;
    } else if (!o.data_path.empty()) {
        full = read_csv(o.data_path);
        info.source = o.data_path;
    } else {
        throw CLI::ValidationError("one of --problem or --data is required");
    }

    std::size_t n_train, n_val;
    SplitPattern pattern;
    if (o.split == "paper") {
        pattern = SplitPattern::seeded;
        n_train = 320;
        n_val = 305;
    } else {
        pattern = SplitPattern::stride2;
        n_train = (full.size() + 1) / 2;
        n_val = full.size() / 2;
    }
    auto [train_raw, val_raw] = grid_split(full, n_train, n_val, pattern);
    auto [train_std, stats] = fit_standardize(train_raw);
    Dataset val_std = apply_standardize(val_raw, stats);

    info.split_pattern = o.split == "paper" ? "seeded" : "stride2";
    info.n_train = n_train;
    info.n_val = n_val;
    return {{std::move(train_std), std::move(val_std)}, info};
}

int cmd_generate(const CliOpts& o) {
    if (o.problem.empty()) throw CLI::ValidationError("generate requires --problem");
    const std::string out_file = o.out.empty() ? "dataset.csv" : o.out;
    const Dataset d = sample_grid(builtin(o.problem), o.points_per_axis);
    write_csv(d, out_file);
    std::printf("wrote %zu samples to %s\n", d.size(), out_file.c_str());
    return 0;
}

int cmd_train(const CliOpts& o) {
    if (o.modes.size() != 1) {
        throw CLI::ValidationError("train requires exactly one --mode");
    }
    const int mode = o.modes.front();
    auto [datasets, info] = prepare_datasets(o);
    TrainConfig tc = train_config_from(o);
    tc.mode = mode;
    auto [params, trace] = train(tc, datasets.first, datasets.second);
    (void)params;

    namespace fs = std::filesystem;
    const std::string out_dir = o.out.empty() ? "out" : o.out;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + out_dir + "'");
    const std::string trace_path =
        (fs::path(out_dir) /
         ("trace_" + std::to_string(mode) + "_" + std::to_string(o.seed) + ".csv"))
            .string();
    write_trace_csv(trace, trace_path);

    const TraceRow& last = trace.rows.back();
    nlohmann::json run{
        {"mode", mode},
        {"seed", o.seed},
        {"iterations", trace.rows.size()},
        {"final_val_l2", last.val_l2},
        {"final_weighted_loss", last.weighted_loss},
        {"final_lambda", last.lambda},
        {"duration_s", trace.duration_seconds},
    };
    std::ofstream js(fs::path(out_dir) / "run.json");
    js << run.dump(2) << "\n";
    std::printf("mode %d seed %llu: final val l2 %.6f (%zu iterations) -> %s\n", mode,
                static_cast<unsigned long long>(o.seed), last.val_l2, trace.rows.size(),
                trace_path.c_str());
    return 0;
}

int cmd_sweep(CliOpts o, bool runs_given, bool epochs_given) {
    if (o.preset_paper500) {
        if (o.problem.empty() && o.data_path.empty()) o.problem = "trig";
        o.points_per_axis = 25;
        o.split = "paper";
        if (o.modes.empty()) o.modes = {kModeSobolev};
        if (!runs_given) o.runs = 100;
        if (!epochs_given) o.epochs = 500;
    }
    if (o.modes.empty()) throw CLI::ValidationError("sweep requires at least one --mode");

    auto [datasets, info] = prepare_datasets(o);
    SweepConfig sc;
    sc.base = train_config_from(o);
    sc.modes = o.modes;
    sc.n_runs = o.runs;
    sc.seed_offset = o.seed;
    sc.threads = o.threads;
    sc.keep_traces = o.keep_traces;
    SweepResult result = sweep(datasets.first, datasets.second, sc);
    result.protocol.source = info.source;
    result.protocol.split_pattern = info.split_pattern;
    result.protocol.n_train = info.n_train;
    result.protocol.n_val = info.n_val;
    const std::string out_dir = o.out.empty() ? "out" : o.out;
    export_results(result, out_dir);

    for (const ModeStatistics& st : result.stats) {
        std::printf("mode %2d: mean %.6f  median %.6f  [q1 %.6f, q3 %.6f]  min %.6f  max %.6f"
                    "  (%zu runs, %zu diverged)\n",
                    st.mode, st.mean, st.median, st.q1, st.q3, st.min, st.max, st.n_runs,
                    st.n_diverged);
    }
    std::printf("results in %s\n", out_dir.c_str());
    return 0;
}

int cmd_gradcheck(const CliOpts& o) {
    const GradCheckReport report = run_gradcheck(shape_from(o), o.checks, o.seed);
    std::printf("%s\n", report.summary().c_str());
    return report.passed ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Sobolev-trained MLP toolkit: gradient-enhanced regression with residual weighting"};
    app.require_subcommand(1);
    app.fallthrough(true);
    app.set_config("--config", "", "Key-value config file; command-line flags override it");

    CliOpts o;
    app.add_option("--problem", o.problem, "Builtin problem: trig, peaks, ridge");
    app.add_option("--data", o.data_path, "CSV dataset path")->check(CLI::ExistingFile);
    app.add_option("--points", o.points_per_axis, "Grid points per axis for --problem")
        ->check(CLI::Range(std::size_t{2}, std::size_t{10000}));
    app.add_option("--split", o.split, "Train/validation split: stride2 or paper (320/305 seeded)")
        ->check(CLI::IsMember({"stride2", "paper"}));
    app.add_option("--layers", o.layers, "Layer sizes, e.g. 2,5,3,3,1")->delimiter(',');
    app.add_option("--mode", o.modes, "Residual-weighting mode 1-13 (sweep accepts several)")
        ->delimiter(',')
        ->check(CLI::Range(1, 13));
    app.add_option("--epochs", o.epochs, "Training epochs")->check(CLI::PositiveNumber);
    app.add_option("--batch-size,--batch_size", o.batch_size, "Minibatch size")
        ->check(CLI::PositiveNumber);
    app.add_option("--learn-rate,--learn_rate", o.learn_rate, "ADAM learning rate")
        ->check(CLI::PositiveNumber);
    app.add_option("--beta1", o.beta1, "ADAM gradient decay");
    app.add_option("--beta2", o.beta2, "ADAM squared-gradient decay");
    app.add_option("--epsilon", o.adam_epsilon, "ADAM epsilon");
    app.add_option("--mu", o.schedule_rate, "Per-epoch rate for modes 12-13");
    app.add_option("--seed", o.seed, "Base RNG seed (sweep: first seed of the range)");
    app.add_option("--runs", o.runs, "Seeds per mode for sweep")->check(CLI::PositiveNumber);
    app.add_option("--threads", o.threads, "Sweep worker threads (0 = hardware)");
    app.add_option("--checks", o.checks, "Randomized checks for gradcheck")
        ->check(CLI::PositiveNumber);
    app.add_flag("--traces", o.keep_traces, "Export per-run trace CSVs from sweep");
    app.add_flag("--preset-paper500", o.preset_paper500,
                 "25x25 grid, 320/305 seeded split, 500 epochs, 100 runs");
    app.add_option("--out", o.out, "Output CSV (generate) or directory (train/sweep)");

    CLI::App* generate = app.add_subcommand("generate", "Sample a builtin problem grid to CSV");
    CLI::App* tr = app.add_subcommand("train", "One seeded training run; emits its trace");
    CLI::App* sw = app.add_subcommand("sweep", "Multi-seed sweep over modes; exports statistics");
    CLI::App* gc = app.add_subcommand("gradcheck", "Finite-difference gradient verification");
    for (CLI::App* sub : {generate, tr, sw, gc}) sub->fallthrough(true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*generate) return cmd_generate(o);
        if (*tr) return cmd_train(o);
        if (*sw) return cmd_sweep(o, app.count("--runs") > 0, app.count("--epochs") > 0);
        if (*gc) return cmd_gradcheck(o);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}

}  // namespace sobnn
