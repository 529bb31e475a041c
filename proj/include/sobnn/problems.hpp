#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sobnn/data.hpp"
#include "sobnn/mathcore.hpp"

namespace sobnn {

/// Scalar benchmark response with a closed-form gradient, evaluated on a
/// box domain (one interval per input).
struct AnalyticProblem {
    std::string name;
    std::size_t n_in = 2;
    std::vector<std::array<double, 2>> domain;  // per-input [lo, hi]
    std::function<std::pair<double, Vector>(const Vector&)> eval;
};

/// Available: trig, peaks, ridge.
AnalyticProblem builtin(const std::string& name);
std::vector<std::string> builtin_names();

/// Tensor-product grid with endpoints included, row-major over inputs
/// (last input varies fastest).
Dataset sample_grid(const AnalyticProblem& p, std::size_t points_per_axis);

}  // namespace sobnn
