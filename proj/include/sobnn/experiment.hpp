#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sobnn/data.hpp"
#include "sobnn/trainer.hpp"

namespace sobnn {

struct RunSummary {
    int mode = 0;
    std::uint64_t seed = 0;
    double final_l2 = 0.0;   // validation error at the last iteration
    double lowest_l2 = 0.0;  // minimum over the trace
    double duration_seconds = 0.0;
    Vector final_lambda;
    bool diverged = false;
    std::size_t diverged_iteration = 0;
};

struct ModeStatistics {
    int mode = 0;
    std::size_t n_runs = 0;  // completed runs entering the statistics
    std::size_t n_diverged = 0;
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double min = 0.0;
    double max = 0.0;
    double mean_duration_seconds = 0.0;
    double total_duration_seconds = 0.0;
};

struct Quartiles {
    double q1, median, q3;
};

/// Median-of-halves quartiles: q1/q3 are the medians of the lower/upper
/// half of the sorted values, excluding the middle element when n is odd.
Quartiles quartiles(std::vector<double> values);

/// Protocol details recorded alongside exported statistics.
struct ProtocolInfo {
    std::string source;        // problem name or csv path
    std::string split_pattern; // stride2 | seeded | none
    std::size_t n_train = 0;
    std::size_t n_val = 0;
    std::uint64_t seed_offset = 0;
    std::size_t n_runs = 0;
    std::size_t epochs = 0;
    std::size_t batch_size = 0;
    std::vector<std::size_t> layers;
    double learn_rate = 0.0;
    double schedule_rate = 0.0;
};

struct SweepConfig {
    TrainConfig base;           // seed field is ignored; runs use seed_offset..+n_runs-1
    std::vector<int> modes;
    std::size_t n_runs = 1;
    std::uint64_t seed_offset = 0;
    std::size_t threads = 0;    // 0 -> hardware concurrency
    bool keep_traces = false;
};

struct SweepResult {
    std::vector<ModeStatistics> stats;   // one per mode, in requested order
    std::vector<RunSummary> runs;        // ordered by (mode position, seed)
    std::vector<RunTrace> traces;        // parallel to runs when keep_traces
    ProtocolInfo protocol;
};

/// Trains every (mode, seed) pair on the shared standardized datasets, in
/// parallel, and aggregates per-mode statistics. Diverged runs are excluded
/// from the statistics but counted.
SweepResult sweep(const Dataset& train_std, const Dataset& val_std, const SweepConfig& cfg);

ModeStatistics compute_statistics(int mode, const std::vector<RunSummary>& runs);

/// Writes summary.json (deterministic: no wall-clock content), runs.csv,
/// timing.json, and per-run trace CSVs when kept.
void export_results(const SweepResult& result, const std::string& out_dir);

std::vector<RunSummary> import_runs_csv(const std::string& path);

void write_trace_csv(const RunTrace& trace, const std::string& path);

}  // namespace sobnn
