#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "sobnn/network.hpp"

namespace sobnn {

/// Weighted single-sample loss evaluated without any analytic parameter
/// gradients: forward pass, masked-chain Jacobian, loss terms.
double loss_at(const NetworkParams& params, const Vector& x, const Vector& y,
               const Matrix& jac_true, std::span<const double> lambda);

/// Central finite differences of loss_at w.r.t. every parameter.
Vector fd_param_gradient(const NetworkParams& params, const Vector& x, const Vector& y,
                         const Matrix& jac_true, std::span<const double> lambda, double h = 1e-6);

/// Central finite differences of the forward pass w.r.t. the inputs.
Matrix fd_input_jacobian(const NetworkParams& params, const Vector& x, double h = 1e-6);

struct GradCheckReport {
    std::size_t checks = 0;
    double max_jacobian_rel_err = 0.0;
    double max_param_rel_err = 0.0;
    bool passed = false;
    std::string summary() const;
};

/// Runs `checks` randomized comparisons of analytic input Jacobians and full
/// weighted parameter gradients against central differences on freshly
/// initialized networks. Samples with any hidden |z| below kink_guard are
/// redrawn (ReLU masks must not flip inside the FD stencil).
GradCheckReport run_gradcheck(const NetworkShape& shape, std::size_t checks, std::uint64_t seed,
                              double tolerance = 1e-6, double kink_guard = 1e-4);

}  // namespace sobnn
