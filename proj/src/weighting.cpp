#include "sobnn/weighting.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sobnn {

namespace {

constexpr double kClampCenter = 1.2;
constexpr double kFdStep = 1e-6;

[[noreturn]] void bad_mode(int mode, const char* op) {
    throw std::invalid_argument(std::string(op) + ": invalid mode " + std::to_string(mode));
}

// |sum_i lambda_i g_i| from the Gram matrix.
double total_grad_norm(const Matrix& gram, std::span<const double> lambda) {
    double q = 0.0;
    const std::size_t k = lambda.size();
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) q += lambda[i] * lambda[j] * gram(i, j);
    return std::sqrt(std::max(q, 0.0));
}

// cos(u, v) from precomputed u.v, |u|, |v|, with the zero-vector convention.
double cos_from_parts(double uv, double nu, double nv) {
    if (nu < 1e-300 || nv < 1e-300) return 0.0;
    return uv / (nu * nv);
}

}  // namespace

double clamp_map_scalar(double raw, double eps0) {
    return 1.0 - erf((kClampCenter - raw) / std::numbers::sqrt3) + eps0;
}

Vector clamp_map(const Vector& raw, double eps0) {
    Vector out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = clamp_map_scalar(raw[i], eps0);
    return out;
}

double clamp_derivative(double raw) {
    const double u = kClampCenter - raw;
    return 2.0 / std::sqrt(3.0 * std::numbers::pi) * std::exp(-u * u / 3.0);
}

ResidualWeightState fixed_state(int mode, std::size_t n_in) {
    if (mode != kModeSobolev && mode != kModeResponseOnly) bad_mode(mode, "fixed_state");
    ResidualWeightState st;
    st.mode = mode;
    st.clamped.assign(1 + n_in, mode == kModeSobolev ? 1.0 : 0.0);
    st.clamped[0] = 1.0;
    return st;
}

ResidualWeightState initial_state(int mode, std::size_t n_in, double eps0, double schedule_rate) {
    if (!is_valid_mode(mode)) bad_mode(mode, "initial_state");
    if (mode == kModeSobolev || mode == kModeResponseOnly) {
        ResidualWeightState st = fixed_state(mode, n_in);
        st.epsilon0 = eps0;
        st.schedule_rate = schedule_rate;
        return st;
    }
    ResidualWeightState st;
    st.mode = mode;
    st.epsilon0 = eps0;
    st.schedule_rate = schedule_rate;
    if (is_adaptive_mode(mode)) {
        st.raw.assign(1 + n_in, kClampCenter);
        st.clamped = clamp_map(st.raw, eps0);
        st.moments = AdamState(1 + n_in);
    } else if (mode == kModeScheduledDecay) {
        st.clamped.assign(1 + n_in, 1.0);
    } else {  // scheduled growth: a zero start would never grow
        st.clamped.assign(1 + n_in, eps0);
        st.clamped[0] = 1.0;
    }
    return st;
}

WeightingContext WeightingContext::build(Vector loss_components,
                                         std::vector<Vector> per_loss_grads,
                                         std::span<const double> lambda) {
    if (loss_components.size() != per_loss_grads.size() ||
        loss_components.size() != lambda.size()) {
        throw std::invalid_argument("WeightingContext: component count mismatch");
    }
    WeightingContext ctx;
    ctx.loss_components = std::move(loss_components);
    ctx.per_loss_grads = std::move(per_loss_grads);
    const std::size_t k = ctx.per_loss_grads.size();
    ctx.gram = Matrix(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            const double d = dot(ctx.per_loss_grads[i], ctx.per_loss_grads[j]);
            ctx.gram(i, j) = d;
            ctx.gram(j, i) = d;
        }
    }
    const std::size_t n = ctx.per_loss_grads.empty() ? 0 : ctx.per_loss_grads.front().size();
    ctx.total_grad.assign(n, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const double w = lambda[i];
        const Vector& g = ctx.per_loss_grads[i];
        for (std::size_t p = 0; p < n; ++p) ctx.total_grad[p] += w * g[p];
    }
    return ctx;
}

double objective(int mode, const WeightingContext& ctx, std::span<const double> lambda) {
    const std::size_t k = lambda.size();
    if (ctx.loss_components.size() != k) {
        throw std::invalid_argument("objective: lambda length mismatch");
    }
    switch (mode) {
        case 1:
        case 2: {
            double total = 0.0;
            for (std::size_t i = 0; i < k; ++i) total += lambda[i] * ctx.loss_components[i];
            return mode == 1 ? total : -total;
        }
        case 3:
        case 4: {
            const double norm = total_grad_norm(ctx.gram, lambda);
            return mode == 3 ? norm : -norm;
        }
        case 5: {
            double mean = 0.0;
            for (std::size_t i = 0; i < k; ++i) mean += lambda[i] * ctx.loss_components[i];
            mean /= static_cast<double>(k);
            double var = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                const double c = lambda[i] * ctx.loss_components[i] - mean;
                var += c * c;
            }
            return var / static_cast<double>(k);
        }
        case 6:
        case 7: {
            // cos(total, lambda_i g_i) per component.
            const double norm_total = total_grad_norm(ctx.gram, lambda);
            double sum = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                double gi_dot_total = 0.0;
                for (std::size_t j = 0; j < k; ++j) gi_dot_total += lambda[j] * ctx.gram(i, j);
                const double norm_i = std::abs(lambda[i]) * std::sqrt(std::max(ctx.gram(i, i), 0.0));
                const double c = cos_from_parts(lambda[i] * gi_dot_total, norm_total, norm_i);
                sum += mode == 6 ? 1.0 - c : c * c;
            }
            return sum;
        }
        case 8:
        case 9: {
            // cos(lambda_R g_R, lambda_j g_j) per sensitivity component.
            const double norm_r =
                std::abs(lambda[0]) * std::sqrt(std::max(ctx.gram(0, 0), 0.0));
            double sum = 0.0;
            for (std::size_t j = 1; j < k; ++j) {
                const double norm_j =
                    std::abs(lambda[j]) * std::sqrt(std::max(ctx.gram(j, j), 0.0));
                const double c =
                    cos_from_parts(lambda[0] * lambda[j] * ctx.gram(0, j), norm_r, norm_j);
                sum += mode == 8 ? 1.0 - c : c * c;
            }
            return sum;
        }
        default:
            bad_mode(mode, "objective");
    }
}

Vector lambda_gradient(int mode, const WeightingContext& ctx, const ResidualWeightState& state) {
    if (!is_adaptive_mode(mode)) bad_mode(mode, "lambda_gradient");
    const std::size_t k = state.clamped.size();
    Vector grad(k, 0.0);
    Vector perturbed = state.clamped;
    for (std::size_t i = 0; i < k; ++i) {
        const double base = perturbed[i];
        perturbed[i] = base + kFdStep;
        const double hi = objective(mode, ctx, perturbed);
        perturbed[i] = base - kFdStep;
        const double lo = objective(mode, ctx, perturbed);
        perturbed[i] = base;
        grad[i] = (hi - lo) / (2.0 * kFdStep) * clamp_derivative(state.raw[i]);
    }
    return grad;
}

ResidualWeightState update_adaptive(ResidualWeightState state, const WeightingContext& ctx,
                                    const AdamConfig& cfg) {
    if (!is_adaptive_mode(state.mode)) bad_mode(state.mode, "update_adaptive");
    const Vector grad = lambda_gradient(state.mode, ctx, state);
    const Vector update = adam_step(state.moments, grad, cfg);
    for (std::size_t i = 0; i < state.raw.size(); ++i) state.raw[i] += update[i];
    state.clamped = clamp_map(state.raw, state.epsilon0);
    return state;
}

ResidualWeightState update_scheduled(ResidualWeightState state, std::size_t epoch) {
    if (!is_scheduled_mode(state.mode)) bad_mode(state.mode, "update_scheduled");
    const double factor = 1.0 + state.schedule_rate * static_cast<double>(epoch);
    for (std::size_t j = 1; j < state.clamped.size(); ++j) {
        state.clamped[j] =
            state.mode == kModeScheduledDecay ? state.clamped[j] / factor : state.clamped[j] * factor;
    }
    state.clamped[0] = 1.0;
    return state;
}

}  // namespace sobnn
