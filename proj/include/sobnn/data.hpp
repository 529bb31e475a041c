#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sobnn/mathcore.hpp"

namespace sobnn {

/// One training pair: inputs, responses, and the response/input sensitivity
/// matrix (n_out x n_in).
struct SamplePoint {
    Vector x;
    Vector y;
    Matrix dy_dx;
};

struct StandardizationStats {
    Vector x_mean;
    Vector x_std;
    Vector y_mean;
    Vector y_std;
};

struct Dataset {
    std::vector<SamplePoint> samples;
    std::optional<StandardizationStats> stats;
    bool standardized = false;

    std::size_t size() const { return samples.size(); }
    std::size_t n_in() const { return samples.empty() ? 0 : samples.front().x.size(); }
    std::size_t n_out() const { return samples.empty() ? 0 : samples.front().y.size(); }
};

struct MinibatchPlan {
    std::size_t batch_size = 64;
    std::uint64_t rng_seed = 0;
};

/// Standardizes inputs and responses to zero mean / unit (population) std and
/// rescales sensitivities accordingly. Throws on constant columns.
std::pair<Dataset, StandardizationStats> fit_standardize(const Dataset& train);

/// Same transform with frozen stats (validation data reuses training stats).
Dataset apply_standardize(const Dataset& d, const StandardizationStats& stats);

/// Inverse of apply_standardize.
Dataset unstandardize(const Dataset& d);

/// Sensitivity entries scaled by sigma_x[e] / sigma_y[i].
SamplePoint scale_sensitivities(const SamplePoint& s, const StandardizationStats& stats);

enum class SplitPattern { stride2, seeded };

/// Deterministic train/validation split. stride2 interleaves even/odd flat
/// indices; seeded applies a fixed-seed permutation before taking counts.
std::pair<Dataset, Dataset> grid_split(const Dataset& d, std::size_t n_train, std::size_t n_val,
                                       SplitPattern pattern);

/// Training index permutation for one epoch (seeded per epoch from the plan).
std::vector<std::size_t> epoch_permutation(std::size_t n_train, const MinibatchPlan& plan,
                                           std::size_t epoch);

/// Index slices for one epoch; the final short batch is kept.
std::vector<std::vector<std::size_t>> minibatches(const Dataset& train, const MinibatchPlan& plan,
                                                  std::size_t epoch);

// CSV schema: x1,..,xN,y1,..,yM,dy1_dx1,..,dyM_dxN (header required, '.'
// decimal, one sample per line).
Dataset read_csv(const std::string& path);
void write_csv(const Dataset& d, const std::string& path);

}  // namespace sobnn
