#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sobnn/data.hpp"
#include "sobnn/network.hpp"
#include "sobnn/optim.hpp"
#include "sobnn/weighting.hpp"

namespace sobnn {

struct TrainConfig {
    NetworkShape shape;
    int mode = kModeSobolev;
    std::size_t epochs = 500;
    AdamConfig adam_theta;
    AdamConfig adam_lambda;
    std::size_t batch_size = 64;
    std::uint64_t seed = 0;
    double schedule_rate = 0.01;  // mu for modes 12-13
    double epsilon0 = 0.01;
    std::size_t val_stride = 1;   // validation error every n iterations

    void validate() const;
};

struct TraceRow {
    double weighted_loss = 0.0;
    double response_loss = 0.0;
    Vector sensitivity_loss;  // per input
    Vector lambda;            // clamped weights used this iteration
    double val_l2 = 0.0;
};

struct RunTrace {
    std::vector<TraceRow> rows;
    double duration_seconds = 0.0;
};

struct DivergenceError : std::runtime_error {
    std::size_t iteration;
    explicit DivergenceError(std::size_t iter)
        : std::runtime_error("training diverged (non-finite loss) at iteration " +
                             std::to_string(iter)),
          iteration(iter) {}
};

/// One seeded training run over standardized train/validation sets sharing
/// stats. Per iteration: minibatch losses and gradients, theta ADAM step,
/// then the mode's weight update from the same cached gradients.
std::pair<NetworkParams, RunTrace> train(const TrainConfig& cfg, const Dataset& train_set,
                                         const Dataset& val_set);

std::size_t count_iterations(const TrainConfig& cfg, std::size_t n_train);

}  // namespace sobnn
