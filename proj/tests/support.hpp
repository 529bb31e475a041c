// Shared test helpers: random generators and the independent response-only
// training reference used by the mode-11 equivalence checks.
#pragma once

#include <cmath>
#include <vector>

#include "sobnn/data.hpp"
#include "sobnn/network.hpp"
#include "sobnn/optim.hpp"
#include "sobnn/rng.hpp"

namespace testsupport {

inline sobnn::Vector random_vector(sobnn::Rng& rng, std::size_t n, double lo = -1.0,
                                   double hi = 1.0) {
    sobnn::Vector v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

inline sobnn::Matrix random_matrix(sobnn::Rng& rng, std::size_t r, std::size_t c,
                                   double lo = -1.0, double hi = 1.0) {
    sobnn::Matrix m(r, c);
    for (double& x : m.data) x = rng.uniform(lo, hi);
    return m;
}

// Plain half-MSE backprop written independently of the library's weighted
// path: delta recursion only, no Jacobian machinery.
inline sobnn::Vector response_only_gradient(const sobnn::NetworkParams& params,
                                            const sobnn::ForwardCache& cache,
                                            const sobnn::Vector& y) {
    const std::size_t L = params.shape.depth();
    sobnn::Vector flat(params.param_count(), 0.0);

    std::vector<sobnn::Vector> deltas(L);
    sobnn::Vector delta(params.shape.n_out());
    for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = cache.output()[i] - y[i];
    for (std::size_t l = L; l >= 1; --l) {
        deltas[l - 1] = delta;
        if (l > 1) {
            const sobnn::Matrix& w = params.weights[l - 1];
            sobnn::Vector next(w.cols, 0.0);
            for (std::size_t i = 0; i < w.rows; ++i)
                for (std::size_t j = 0; j < w.cols; ++j) next[j] += w(i, j) * delta[i];
            for (std::size_t j = 0; j < next.size(); ++j)
                next[j] *= cache.z[l - 2][j] > 0.0 ? 1.0 : 0.0;
            delta = std::move(next);
        }
    }
    std::size_t pos = 0;
    for (std::size_t l = 1; l <= L; ++l) {
        const sobnn::Vector& d = deltas[l - 1];
        const sobnn::Vector& o_prev = cache.o[l - 1];
        for (std::size_t i = 0; i < d.size(); ++i)
            for (std::size_t j = 0; j < o_prev.size(); ++j) flat[pos++] = d[i] * o_prev[j];
        for (std::size_t i = 0; i < d.size(); ++i) flat[pos++] = d[i];
    }
    return flat;
}

// Minimal response-only training loop mirroring the trainer's update order
// and batch averaging. Returns the per-iteration mean response loss.
inline std::vector<double> response_only_training_losses(const sobnn::NetworkShape& shape,
                                                         const sobnn::Dataset& train,
                                                         std::size_t epochs,
                                                         std::size_t batch_size,
                                                         std::uint64_t seed,
                                                         const sobnn::AdamConfig& adam) {
    sobnn::NetworkParams params = sobnn::init_params(shape, sobnn::derive_seed(seed, 0x1));
    sobnn::AdamState moments(params.param_count());
    sobnn::MinibatchPlan plan{batch_size, sobnn::derive_seed(seed, 0x2)};

    std::vector<double> losses;
    for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
        for (const auto& batch : sobnn::minibatches(train, plan, epoch)) {
            sobnn::Vector grad(params.param_count(), 0.0);
            double e_resp = 0.0;
            for (std::size_t idx : batch) {
                const sobnn::SamplePoint& s = train.samples[idx];
                const sobnn::ForwardCache cache = sobnn::forward(params, s.x);
                double half_sq = 0.0;
                for (std::size_t i = 0; i < s.y.size(); ++i) {
                    const double r = cache.output()[i] - s.y[i];
                    half_sq += r * r;
                }
                e_resp += 0.5 * half_sq;
                const sobnn::Vector g = response_only_gradient(params, cache, s.y);
                for (std::size_t p = 0; p < g.size(); ++p) grad[p] += g[p];
            }
            const double inv = 1.0 / static_cast<double>(batch.size());
            e_resp *= inv;
            for (double& v : grad) v *= inv;
            params.apply_update(sobnn::adam_step(moments, grad, adam));
            losses.push_back(e_resp);
        }
    }
    return losses;
}

}  // namespace testsupport
