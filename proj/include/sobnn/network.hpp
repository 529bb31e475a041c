#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sobnn/mathcore.hpp"

namespace sobnn {

/// Layer widths n[0..L]; ReLU on hidden layers, identity on the output.
struct NetworkShape {
    std::vector<std::size_t> layer_sizes;

    std::size_t depth() const { return layer_sizes.size() - 1; }  // L
    std::size_t n_in() const { return layer_sizes.front(); }
    std::size_t n_out() const { return layer_sizes.back(); }
    void validate() const;
};

struct NetworkParams {
    NetworkShape shape;
    std::vector<Matrix> weights;  // weights[l-1] is W[l], n[l] x n[l-1]
    std::vector<Vector> biases;   // biases[l-1] is b[l]

    std::size_t param_count() const;
    /// Concatenation in the fixed block order W[1],b[1],...,W[L],b[L],
    /// each weight block row-major.
    Vector flatten() const;
    /// theta += delta, delta in flatten() layout.
    void apply_update(const Vector& delta);
    void set_flat(const Vector& theta);
};

struct ForwardCache {
    std::vector<Vector> z;  // z[l], l = 1..L, stored at [l-1]
    std::vector<Vector> o;  // o[l], l = 0..L (o[0] = x, o[L] = y_hat)

    const Vector& output() const { return o.back(); }
    /// Smallest |z| over hidden layers; used as a ReLU kink guard by
    /// finite-difference checks.
    double min_abs_hidden_preactivation() const;
};

/// He-uniform weights (bound sqrt(6/fan_in)), zero biases, deterministic
/// per seed.
NetworkParams init_params(const NetworkShape& shape, std::uint64_t seed);

ForwardCache forward(const NetworkParams& params, const Vector& x);

/// Exact Jacobian d y_hat / d x (n_out x n_in) for the cached activation
/// pattern, via the masked weight-product chain.
Matrix input_jacobian(const NetworkParams& params, const ForwardCache& cache);

/// Partial products of the masked chain J = W[L] D[L-1] ... D[1] W[1].
/// With ReLU the masks D carry no parameter dependence (a'' = 0), so the
/// Jacobian is linear in each W[l]: J = up[l] * W[l] * down_o[l-1].
struct JacobianChain {
    std::vector<Matrix> up;      // up[l] = d y_hat / d z[l] (n_out x n[l]), l = 1..L at [l-1]
    std::vector<Matrix> down_o;  // down_o[l] = d o[l] / d x (n[l] x n_in),  l = 0..L-1 at [l]
    Matrix jac;                  // d y_hat / d x
};
JacobianChain jacobian_chain(const NetworkParams& params, const ForwardCache& cache);

struct BackpropState {
    std::vector<Vector> delta;   // response-path delta per layer
    std::vector<Matrix> grad_w;
    std::vector<Vector> grad_b;
    Vector flat;                 // flatten() layout
};

/// Single-sample gradient of lambda[0]*E_resp + sum_j lambda[1+j]*E_sens_j
/// w.r.t. all parameters. resid_y = y_hat - y, resid_jac = J_hat - J_true
/// (both in standardized space); lambda has length 1 + n_in.
BackpropState backprop(const NetworkParams& params, const ForwardCache& cache,
                       const Vector& resid_y, const Matrix& resid_jac,
                       std::span<const double> lambda);

/// Unweighted flat gradients [g_resp, g_sens_1, ..., g_sens_n_in] of the
/// individual loss terms; sum_i lambda[i]*g[i] reconstructs backprop().
std::vector<Vector> per_loss_gradients(const NetworkParams& params, const ForwardCache& cache,
                                       const Vector& resid_y, const Matrix& resid_jac);

}  // namespace sobnn
