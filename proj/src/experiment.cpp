#include "sobnn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace sobnn {

namespace {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

double median_of_sorted(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    const std::size_t n = hi - lo;
    const std::size_t mid = lo + n / 2;
    if (n % 2 == 1) return v[mid];
    return 0.5 * (v[mid - 1] + v[mid]);
}

json stats_to_json(const ModeStatistics& s) {
    return json{
        {"mode", s.mode},       {"n_runs", s.n_runs}, {"n_diverged", s.n_diverged},
        {"mean", s.mean},       {"median", s.median}, {"q1", s.q1},
        {"q3", s.q3},           {"min", s.min},       {"max", s.max},
    };
}

}  // namespace

Quartiles quartiles(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("quartiles: empty input");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    Quartiles q{};
    q.median = median_of_sorted(values, 0, n);
    if (n == 1) {
        q.q1 = q.q3 = values.front();
        return q;
    }
    const std::size_t half = n / 2;
    q.q1 = median_of_sorted(values, 0, half);
    q.q3 = median_of_sorted(values, n - half, n);
    return q;
}

ModeStatistics compute_statistics(int mode, const std::vector<RunSummary>& runs) {
    ModeStatistics st;
    st.mode = mode;
    std::vector<double> finals;
    for (const RunSummary& r : runs) {
        if (r.mode != mode) continue;
        if (r.diverged) {
            st.n_diverged += 1;
            continue;
        }
        finals.push_back(r.final_l2);
        st.mean_duration_seconds += r.duration_seconds;
        st.total_duration_seconds += r.duration_seconds;
    }
    st.n_runs = finals.size();
    if (finals.empty()) return st;

    double sum = 0.0;
    st.min = finals.front();
    st.max = finals.front();
    for (double v : finals) {
        sum += v;
        st.min = std::min(st.min, v);
        st.max = std::max(st.max, v);
    }
    st.mean = sum / static_cast<double>(finals.size());
    st.mean_duration_seconds /= static_cast<double>(finals.size());
    const Quartiles q = quartiles(finals);
    st.q1 = q.q1;
    st.median = q.median;
    st.q3 = q.q3;
    return st;
}

SweepResult sweep(const Dataset& train_std, const Dataset& val_std, const SweepConfig& cfg) {
    if (cfg.n_runs < 1) throw std::invalid_argument("sweep: n_runs must be >= 1");
    if (cfg.modes.empty()) throw std::invalid_argument("sweep: no modes requested");
    for (int m : cfg.modes) {
        if (!is_valid_mode(m)) throw std::invalid_argument("sweep: invalid mode " + std::to_string(m));
    }

    const std::size_t total = cfg.modes.size() * cfg.n_runs;
    SweepResult result;
    result.runs.resize(total);
    if (cfg.keep_traces) result.traces.resize(total);
    result.protocol.n_runs = cfg.n_runs;
    result.protocol.seed_offset = cfg.seed_offset;
    result.protocol.epochs = cfg.base.epochs;
    result.protocol.batch_size = cfg.base.batch_size;
    result.protocol.layers = cfg.base.shape.layer_sizes;
    result.protocol.learn_rate = cfg.base.adam_theta.learn_rate;
    result.protocol.schedule_rate = cfg.base.schedule_rate;

    auto run_one = [&](std::size_t slot) {
        const int mode = cfg.modes[slot / cfg.n_runs];
        const std::uint64_t seed = cfg.seed_offset + slot % cfg.n_runs;
        TrainConfig tc = cfg.base;
        tc.mode = mode;
        tc.seed = seed;
        RunSummary& out = result.runs[slot];
        out.mode = mode;
        out.seed = seed;
        try {
            auto [params, trace] = train(tc, train_std, val_std);
            (void)params;
            out.final_l2 = trace.rows.back().val_l2;
            out.lowest_l2 = trace.rows.front().val_l2;
            for (const TraceRow& row : trace.rows) out.lowest_l2 = std::min(out.lowest_l2, row.val_l2);
            out.duration_seconds = trace.duration_seconds;
            out.final_lambda = trace.rows.back().lambda;
            if (cfg.keep_traces) result.traces[slot] = std::move(trace);
        } catch (const DivergenceError& e) {
            out.diverged = true;
            out.diverged_iteration = e.iteration;
        }
    };

    std::size_t n_threads = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
    n_threads = std::max<std::size_t>(1, std::min(n_threads, total));
    if (n_threads == 1) {
        for (std::size_t slot = 0; slot < total; ++slot) run_one(slot);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t slot = next.fetch_add(1);
                    if (slot >= total) return;
                    run_one(slot);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    result.stats.reserve(cfg.modes.size());
    for (int mode : cfg.modes) result.stats.push_back(compute_statistics(mode, result.runs));
    return result;
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    const std::size_t n_sens =
        trace.rows.empty() ? 0 : trace.rows.front().sensitivity_loss.size();
    out << "iteration,weighted_loss,response_loss";
    for (std::size_t j = 1; j <= n_sens; ++j) out << ",sens_loss_" << j;
    for (std::size_t i = 0; i < n_sens + 1; ++i) out << ",lambda_" << i;
    out << ",val_l2\n";
    for (std::size_t it = 0; it < trace.rows.size(); ++it) {
        const TraceRow& r = trace.rows[it];
        out << it << "," << format_double(r.weighted_loss) << ","
            << format_double(r.response_loss);
        for (double v : r.sensitivity_loss) out << "," << format_double(v);
        for (double v : r.lambda) out << "," << format_double(v);
        out << "," << format_double(r.val_l2) << "\n";
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void export_results(const SweepResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + out_dir + "'");

    // summary.json: everything deterministic for a fixed invocation
    json summary;
    summary["protocol"] = json{
        {"source", result.protocol.source},
        {"split_pattern", result.protocol.split_pattern},
        {"n_train", result.protocol.n_train},
        {"n_val", result.protocol.n_val},
        {"n_runs", result.protocol.n_runs},
        {"seeds", json{{"first", result.protocol.seed_offset}, {"count", result.protocol.n_runs}}},
        {"epochs", result.protocol.epochs},
        {"batch_size", result.protocol.batch_size},
        {"layers", result.protocol.layers},
        {"learn_rate", result.protocol.learn_rate},
        {"schedule_rate", result.protocol.schedule_rate},
        {"quartile_convention", "median-of-halves"},
    };
    json modes = json::object();
    for (const ModeStatistics& st : result.stats) modes[std::to_string(st.mode)] = stats_to_json(st);
    summary["modes"] = modes;
    {
        std::ofstream out(fs::path(out_dir) / "summary.json");
        if (!out) throw std::runtime_error("cannot write summary.json in '" + out_dir + "'");
        out << summary.dump(2) << "\n";
    }

    // timing.json: wall-clock lives apart so summary.json stays reproducible
    json timing = json::object();
    for (const ModeStatistics& st : result.stats) {
        timing[std::to_string(st.mode)] = json{
            {"mean_duration_s", st.mean_duration_seconds},
            {"total_duration_s", st.total_duration_seconds},
        };
    }
    {
        std::ofstream out(fs::path(out_dir) / "timing.json");
        if (!out) throw std::runtime_error("cannot write timing.json in '" + out_dir + "'");
        out << timing.dump(2) << "\n";
    }

    // runs.csv: one completed RunSummary per line (diverged runs are only
    // counted, in summary.json)
    std::size_t n_lambda = 0;
    for (const RunSummary& r : result.runs)
        if (!r.diverged) n_lambda = std::max(n_lambda, r.final_lambda.size());
    {
        std::ofstream out(fs::path(out_dir) / "runs.csv");
        if (!out) throw std::runtime_error("cannot write runs.csv in '" + out_dir + "'");
        out << "mode,seed,final_l2,lowest_l2,duration_s";
        for (std::size_t i = 0; i < n_lambda; ++i) out << ",lambda_" << i;
        out << "\n";
        for (const RunSummary& r : result.runs) {
            if (r.diverged) continue;
            out << r.mode << "," << r.seed << "," << format_double(r.final_l2) << ","
                << format_double(r.lowest_l2) << "," << format_double(r.duration_seconds);
            for (std::size_t i = 0; i < n_lambda; ++i)
                out << "," << format_double(i < r.final_lambda.size() ? r.final_lambda[i] : 0.0);
            out << "\n";
        }
    }

    for (std::size_t slot = 0; slot < result.traces.size(); ++slot) {
        const RunSummary& r = result.runs[slot];
        const std::string name =
            "trace_" + std::to_string(r.mode) + "_" + std::to_string(r.seed) + ".csv";
        write_trace_csv(result.traces[slot], (fs::path(out_dir) / name).string());
    }
}

std::vector<RunSummary> import_runs_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("'" + path + "' is empty");

    std::vector<RunSummary> runs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) cells.push_back(tok);
        if (cells.size() < 5) {
            throw std::runtime_error("runs.csv line " + std::to_string(line_no) + ": too few cells");
        }
        auto num = [&](const std::string& s) {
            double v = 0.0;
            auto [p, e] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (e != std::errc{} || p != s.data() + s.size()) {
                throw std::runtime_error("runs.csv line " + std::to_string(line_no) +
                                         ": bad number '" + s + "'");
            }
            return v;
        };
        RunSummary r;
        r.mode = static_cast<int>(num(cells[0]));
        r.seed = static_cast<std::uint64_t>(num(cells[1]));
        r.final_l2 = num(cells[2]);
        r.lowest_l2 = num(cells[3]);
        r.duration_seconds = num(cells[4]);
        for (std::size_t i = 5; i < cells.size(); ++i) r.final_lambda.push_back(num(cells[i]));
        runs.push_back(std::move(r));
    }
    return runs;
}

}  // namespace sobnn
