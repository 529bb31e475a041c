#include "sobnn/trainer.hpp"

#include <chrono>
#include <cmath>

#include "sobnn/loss.hpp"
#include "sobnn/rng.hpp"

namespace sobnn {

namespace {

constexpr std::uint64_t kInitStream = 0x1;
constexpr std::uint64_t kShuffleStream = 0x2;

struct BatchEval {
    double e_resp = 0.0;
    Vector e_sens;                       // per input, batch means
    std::vector<Vector> per_loss_grads;  // batch-mean g_i (adaptive modes)
    Vector weighted_grad;                // batch-mean weighted gradient (other modes)
};

BatchEval evaluate_batch(const NetworkParams& params, const Dataset& train,
                         const std::vector<std::size_t>& batch, const Vector& lambda,
                         bool need_per_loss) {
    const std::size_t n_in = params.shape.n_in();
    const std::size_t k = 1 + n_in;
    BatchEval ev;
    ev.e_sens.assign(n_in, 0.0);
    if (need_per_loss) {
        ev.per_loss_grads.assign(k, Vector(params.param_count(), 0.0));
    } else {
        ev.weighted_grad.assign(params.param_count(), 0.0);
    }

    for (std::size_t idx : batch) {
        const SamplePoint& s = train.samples[idx];
        const ForwardCache cache = forward(params, s.x);
        const Matrix jac = input_jacobian(params, cache);

        Vector resid_y(s.y.size());
        for (std::size_t i = 0; i < s.y.size(); ++i) resid_y[i] = cache.output()[i] - s.y[i];
        Matrix resid_jac = jac;
        for (std::size_t i = 0; i < resid_jac.data.size(); ++i)
            resid_jac.data[i] -= s.dy_dx.data[i];

        ev.e_resp += response_loss(cache.output(), s.y);
        const Vector es = sensitivity_loss_per_input(jac, s.dy_dx);
        for (std::size_t j = 0; j < n_in; ++j) ev.e_sens[j] += es[j];

        if (need_per_loss) {
            const std::vector<Vector> g = per_loss_gradients(params, cache, resid_y, resid_jac);
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t p = 0; p < g[i].size(); ++p) ev.per_loss_grads[i][p] += g[i][p];
            }
        } else {
            const BackpropState bp = backprop(params, cache, resid_y, resid_jac, lambda);
            for (std::size_t p = 0; p < bp.flat.size(); ++p) ev.weighted_grad[p] += bp.flat[p];
        }
    }

    const double inv = 1.0 / static_cast<double>(batch.size());
    ev.e_resp *= inv;
    for (double& v : ev.e_sens) v *= inv;
    if (need_per_loss) {
        for (Vector& g : ev.per_loss_grads)
            for (double& v : g) v *= inv;
    } else {
        for (double& v : ev.weighted_grad) v *= inv;
    }
    return ev;
}

}  // namespace

void TrainConfig::validate() const {
    shape.validate();
    if (!is_valid_mode(mode)) throw std::invalid_argument("train: mode must be in 1..13");
    if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (val_stride < 1) throw std::invalid_argument("train: val_stride must be >= 1");
    adam_theta.validate();
    adam_lambda.validate();
}

std::size_t count_iterations(const TrainConfig& cfg, std::size_t n_train) {
    return cfg.epochs * ((n_train + cfg.batch_size - 1) / cfg.batch_size);
}

std::pair<NetworkParams, RunTrace> train(const TrainConfig& cfg, const Dataset& train_set,
                                         const Dataset& val_set) {
    cfg.validate();
    if (!train_set.standardized || !val_set.standardized || !train_set.stats) {
        throw std::invalid_argument("train: datasets must be standardized with shared stats");
    }
    if (train_set.n_in() != cfg.shape.n_in() || train_set.n_out() != cfg.shape.n_out()) {
        throw std::invalid_argument("train: dataset dimensions do not match network shape");
    }
    const StandardizationStats& stats = *train_set.stats;
    const std::size_t n_in = cfg.shape.n_in();

    const auto t0 = std::chrono::steady_clock::now();

    NetworkParams params = init_params(cfg.shape, derive_seed(cfg.seed, kInitStream));
    AdamState theta_moments(params.param_count());
    ResidualWeightState wstate =
        initial_state(cfg.mode, n_in, cfg.epsilon0, cfg.schedule_rate);
    const bool adaptive = is_adaptive_mode(cfg.mode);

    MinibatchPlan plan{cfg.batch_size, derive_seed(cfg.seed, kShuffleStream)};
    RunTrace trace;
    trace.rows.reserve(count_iterations(cfg, train_set.size()));

    std::size_t iteration = 0;
    double last_val = 0.0;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (const auto& batch : minibatches(train_set, plan, epoch)) {
            const BatchEval ev =
                evaluate_batch(params, train_set, batch, wstate.clamped, adaptive);

            const LossBreakdown breakdown =
                weighted_total(ev.e_resp, ev.e_sens, wstate.clamped);
            if (!std::isfinite(breakdown.total_weighted)) throw DivergenceError(iteration);

            // theta step, then the lambda step, from the same cached gradients
            if (adaptive) {
                Vector components(1 + n_in);
                components[0] = ev.e_resp;
                for (std::size_t j = 0; j < n_in; ++j) components[1 + j] = ev.e_sens[j];
                WeightingContext ctx = WeightingContext::build(
                    std::move(components), ev.per_loss_grads, wstate.clamped);
                params.apply_update(adam_step(theta_moments, ctx.total_grad, cfg.adam_theta));
                wstate = update_adaptive(std::move(wstate), ctx, cfg.adam_lambda);
            } else {
                params.apply_update(adam_step(theta_moments, ev.weighted_grad, cfg.adam_theta));
            }

            if (iteration % cfg.val_stride == 0) {
                last_val = relative_l2_error(params, val_set, stats);
            }
            TraceRow row;
            row.weighted_loss = breakdown.total_weighted;
            row.response_loss = breakdown.response;
            row.sensitivity_loss = breakdown.sensitivity;
            row.lambda = breakdown.lambda_used;
            row.val_l2 = last_val;
            trace.rows.push_back(std::move(row));
            ++iteration;
        }
        if (is_scheduled_mode(cfg.mode)) wstate = update_scheduled(std::move(wstate), epoch);
    }

    trace.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(params), std::move(trace)};
}

}  // namespace sobnn
