#include "sobnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sobnn/rng.hpp"

namespace sobnn {

namespace {

inline double relu(double z) { return z > 0.0 ? z : 0.0; }
// subgradient at 0 chosen as 0
inline double relu_mask(double z) { return z > 0.0 ? 1.0 : 0.0; }

void write_block(Vector& flat, std::size_t& pos, const Matrix& w, const Vector& b) {
    std::copy(w.data.begin(), w.data.end(), flat.begin() + static_cast<std::ptrdiff_t>(pos));
    pos += w.data.size();
    std::copy(b.begin(), b.end(), flat.begin() + static_cast<std::ptrdiff_t>(pos));
    pos += b.size();
}

}  // namespace

void NetworkShape::validate() const {
    if (layer_sizes.size() < 2) {
        throw std::invalid_argument("network shape: need at least input and output layer");
    }
    for (std::size_t n : layer_sizes) {
        if (n < 1) throw std::invalid_argument("network shape: layer sizes must be >= 1");
    }
}

std::size_t NetworkParams::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].data.size() + biases[l].size();
    return n;
}

Vector NetworkParams::flatten() const {
    Vector flat(param_count());
    std::size_t pos = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) write_block(flat, pos, weights[l], biases[l]);
    return flat;
}

void NetworkParams::apply_update(const Vector& delta) {
    if (delta.size() != param_count()) {
        throw std::invalid_argument("apply_update: delta length mismatch");
    }
    std::size_t pos = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (double& w : weights[l].data) w += delta[pos++];
        for (double& b : biases[l]) b += delta[pos++];
    }
}

void NetworkParams::set_flat(const Vector& theta) {
    if (theta.size() != param_count()) {
        throw std::invalid_argument("set_flat: theta length mismatch");
    }
    std::size_t pos = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (double& w : weights[l].data) w = theta[pos++];
        for (double& b : biases[l]) b = theta[pos++];
    }
}

double ForwardCache::min_abs_hidden_preactivation() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l + 1 < z.size(); ++l) {
        for (double v : z[l]) m = std::min(m, std::abs(v));
    }
    return m;
}

NetworkParams init_params(const NetworkShape& shape, std::uint64_t seed) {
    shape.validate();
    NetworkParams p;
    p.shape = shape;
    Rng rng(seed);
    const std::size_t L = shape.depth();
    p.weights.reserve(L);
    p.biases.reserve(L);
    for (std::size_t l = 1; l <= L; ++l) {
        const std::size_t fan_in = shape.layer_sizes[l - 1];
        const std::size_t fan_out = shape.layer_sizes[l];
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
        Matrix w(fan_out, fan_in);
        for (double& v : w.data) v = rng.uniform(-bound, bound);
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(fan_out, 0.0);
    }
    return p;
}

ForwardCache forward(const NetworkParams& params, const Vector& x) {
    const std::size_t L = params.shape.depth();
    if (x.size() != params.shape.n_in()) {
        throw std::invalid_argument("forward: input length " + std::to_string(x.size()) +
                                    ", expected " + std::to_string(params.shape.n_in()));
    }
    ForwardCache cache;
    cache.o.resize(L + 1);
    cache.z.resize(L);
    cache.o[0] = x;
    for (std::size_t l = 1; l <= L; ++l) {
        Vector z = matvec(params.weights[l - 1], cache.o[l - 1]);
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += params.biases[l - 1][i];
        cache.z[l - 1] = z;
        if (l < L) {
            for (double& v : z) v = relu(v);
        }
        cache.o[l] = std::move(z);
    }
    return cache;
}

Matrix input_jacobian(const NetworkParams& params, const ForwardCache& cache) {
    const std::size_t L = params.shape.depth();
    // d z[1] / d x
    Matrix part = params.weights[0];
    for (std::size_t l = 2; l <= L; ++l) {
        // mask rows by a'(z[l-1]), then multiply by W[l]
        const Vector& z_prev = cache.z[l - 2];
        for (std::size_t i = 0; i < part.rows; ++i) {
            const double m = relu_mask(z_prev[i]);
            for (std::size_t j = 0; j < part.cols; ++j) part(i, j) *= m;
        }
        part = matmul(params.weights[l - 1], part);
    }
    return part;
}

JacobianChain jacobian_chain(const NetworkParams& params, const ForwardCache& cache) {
    const std::size_t L = params.shape.depth();
    JacobianChain ch;

    ch.down_o.resize(L);
    ch.down_o[0] = Matrix::identity(params.shape.n_in());
    for (std::size_t l = 1; l < L; ++l) {
        Matrix m = matmul(params.weights[l - 1], ch.down_o[l - 1]);
        const Vector& z = cache.z[l - 1];
        for (std::size_t i = 0; i < m.rows; ++i) {
            const double mask = relu_mask(z[i]);
            for (std::size_t j = 0; j < m.cols; ++j) m(i, j) *= mask;
        }
        ch.down_o[l] = std::move(m);
    }

    ch.up.resize(L);
    ch.up[L - 1] = Matrix::identity(params.shape.n_out());
    for (std::size_t l = L - 1; l >= 1; --l) {
        Matrix m = matmul(ch.up[l], params.weights[l]);  // up[l+1] * W[l+1]
        const Vector& z = cache.z[l - 1];
        for (std::size_t i = 0; i < m.rows; ++i) {
            for (std::size_t j = 0; j < m.cols; ++j) m(i, j) *= relu_mask(z[j]);
        }
        ch.up[l - 1] = std::move(m);
    }

    ch.jac = matmul(params.weights[L - 1], ch.down_o[L - 1]);
    return ch;
}

BackpropState backprop(const NetworkParams& params, const ForwardCache& cache,
                       const Vector& resid_y, const Matrix& resid_jac,
                       std::span<const double> lambda) {
    const std::size_t L = params.shape.depth();
    const std::size_t n_in = params.shape.n_in();
    const std::size_t n_out = params.shape.n_out();
    if (resid_y.size() != n_out) throw std::invalid_argument("backprop: resid_y length mismatch");
    if (resid_jac.rows != n_out || resid_jac.cols != n_in) {
        throw std::invalid_argument("backprop: resid_jac dimensions mismatch");
    }
    if (lambda.size() != 1 + n_in) {
        throw std::invalid_argument("backprop: lambda length must be 1 + n_in");
    }

    BackpropState bp;
    bp.grad_w.resize(L);
    bp.grad_b.resize(L);
    bp.delta.resize(L);

    // Response path: delta recursion scaled by the response weight.
    Vector delta(n_out);
    for (std::size_t i = 0; i < n_out; ++i) delta[i] = lambda[0] * resid_y[i];
    for (std::size_t l = L; l >= 1; --l) {
        bp.delta[l - 1] = delta;
        bp.grad_w[l - 1] = outer(delta, cache.o[l - 1]);
        bp.grad_b[l - 1] = delta;
        if (l > 1) {
            Vector next = matvec(transpose(params.weights[l - 1]), delta);
            const Vector& z = cache.z[l - 2];
            for (std::size_t i = 0; i < next.size(); ++i) next[i] *= relu_mask(z[i]);
            delta = std::move(next);
        }
    }

    // Sensitivity path: d E_sens / d W[l] = up[l]^T * M * down_o[l-1]^T with
    // M the lambda-weighted Jacobian residual; biases get no contribution.
    bool any_sens = false;
    for (std::size_t j = 0; j < n_in; ++j) any_sens = any_sens || lambda[1 + j] != 0.0;
    if (any_sens) {
        Matrix weighted = resid_jac;
        for (std::size_t i = 0; i < n_out; ++i)
            for (std::size_t j = 0; j < n_in; ++j) weighted(i, j) *= lambda[1 + j];
        const JacobianChain ch = jacobian_chain(params, cache);
        for (std::size_t l = 1; l <= L; ++l) {
            const Matrix contrib =
                matmul(transpose(ch.up[l - 1]), matmul(weighted, transpose(ch.down_o[l - 1])));
            Matrix& gw = bp.grad_w[l - 1];
            for (std::size_t k = 0; k < gw.data.size(); ++k) gw.data[k] += contrib.data[k];
        }
    }

    bp.flat.resize(params.param_count());
    std::size_t pos = 0;
    for (std::size_t l = 0; l < L; ++l) {
        std::copy(bp.grad_w[l].data.begin(), bp.grad_w[l].data.end(),
                  bp.flat.begin() + static_cast<std::ptrdiff_t>(pos));
        pos += bp.grad_w[l].data.size();
        std::copy(bp.grad_b[l].begin(), bp.grad_b[l].end(),
                  bp.flat.begin() + static_cast<std::ptrdiff_t>(pos));
        pos += bp.grad_b[l].size();
    }
    return bp;
}

std::vector<Vector> per_loss_gradients(const NetworkParams& params, const ForwardCache& cache,
                                       const Vector& resid_y, const Matrix& resid_jac) {
    const std::size_t L = params.shape.depth();
    const std::size_t n_in = params.shape.n_in();
    const std::size_t n_out = params.shape.n_out();
    if (resid_y.size() != n_out || resid_jac.rows != n_out || resid_jac.cols != n_in) {
        throw std::invalid_argument("per_loss_gradients: residual dimensions mismatch");
    }
    const std::size_t count = params.param_count();
    std::vector<Vector> grads(1 + n_in, Vector(count, 0.0));

    // g_resp: plain half-MSE backprop.
    {
        Vector delta = resid_y;
        std::size_t pos_after = count;
        for (std::size_t l = L; l >= 1; --l) {
            const std::size_t wsize = params.weights[l - 1].data.size();
            const std::size_t bsize = params.biases[l - 1].size();
            const std::size_t pos = pos_after - wsize - bsize;
            Vector& g = grads[0];
            const Vector& o_prev = cache.o[l - 1];
            for (std::size_t i = 0; i < delta.size(); ++i)
                for (std::size_t j = 0; j < o_prev.size(); ++j)
                    g[pos + i * o_prev.size() + j] = delta[i] * o_prev[j];
            for (std::size_t i = 0; i < bsize; ++i) g[pos + wsize + i] = delta[i];
            pos_after = pos;
            if (l > 1) {
                Vector next = matvec(transpose(params.weights[l - 1]), delta);
                const Vector& z = cache.z[l - 2];
                for (std::size_t i = 0; i < next.size(); ++i) next[i] *= relu_mask(z[i]);
                delta = std::move(next);
            }
        }
    }

    // g_sens_j: rank-one per layer, (up[l]^T r_j) (down_o[l-1] e_j)^T.
    const JacobianChain ch = jacobian_chain(params, cache);
    for (std::size_t j = 0; j < n_in; ++j) {
        Vector rcol(n_out);
        for (std::size_t i = 0; i < n_out; ++i) rcol[i] = resid_jac(i, j);
        Vector& g = grads[1 + j];
        std::size_t pos = 0;
        for (std::size_t l = 1; l <= L; ++l) {
            const Matrix& up = ch.up[l - 1];
            const Matrix& down = ch.down_o[l - 1];
            const std::size_t rows = params.weights[l - 1].rows;
            const std::size_t cols = params.weights[l - 1].cols;
            Vector u(rows, 0.0);
            for (std::size_t i = 0; i < n_out; ++i)
                for (std::size_t k = 0; k < rows; ++k) u[k] += up(i, k) * rcol[i];
            for (std::size_t k = 0; k < rows; ++k)
                for (std::size_t c = 0; c < cols; ++c) g[pos + k * cols + c] = u[k] * down(c, j);
            pos += rows * cols + params.biases[l - 1].size();
        }
    }
    return grads;
}

}  // namespace sobnn
