#include "sobnn/optim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sobnn {

void AdamConfig::validate() const {
    if (!(learn_rate > 0.0)) throw std::invalid_argument("adam: learn_rate must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("adam: beta1 must be in [0,1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("adam: beta2 must be in [0,1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("adam: epsilon must be > 0");
}

Vector adam_step(AdamState& state, const Vector& grad, const AdamConfig& cfg) {
    if (grad.size() != state.m.size()) {
        throw std::invalid_argument("adam_step: gradient length " + std::to_string(grad.size()) +
                                    " does not match state length " + std::to_string(state.m.size()));
    }
    state.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));

    Vector update(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) {
        const double g = grad[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        update[i] = -cfg.learn_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
    return update;
}

}  // namespace sobnn
