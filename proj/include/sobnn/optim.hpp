#pragma once

#include <cstddef>

#include "sobnn/mathcore.hpp"

namespace sobnn {

struct AdamConfig {
    double learn_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
};

struct AdamState {
    Vector m;
    Vector v;
    std::size_t t = 0;

    AdamState() = default;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected ADAM step. Advances the moments and returns the
/// additive parameter update -lr * m_hat / (sqrt(v_hat) + eps).
Vector adam_step(AdamState& state, const Vector& grad, const AdamConfig& cfg);

}  // namespace sobnn
