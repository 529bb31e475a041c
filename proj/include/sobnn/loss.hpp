#pragma once

#include <span>

#include "sobnn/data.hpp"
#include "sobnn/mathcore.hpp"
#include "sobnn/network.hpp"

namespace sobnn {

struct LossBreakdown {
    double response = 0.0;
    Vector sensitivity;      // one term per input
    double total_weighted = 0.0;
    Vector lambda_used;
};

/// Half squared error 0.5*|y_hat - y|^2 for one sample.
double response_loss(const Vector& y_hat, const Vector& y);

/// Column-wise half squared errors 0.5*|J_hat[:,j] - J_true[:,j]|^2.
Vector sensitivity_loss_per_input(const Matrix& jac_hat, const Matrix& jac_true);

/// lambda[0]*response + sum_j lambda[1+j]*sensitivity[j], with the lambda
/// snapshot recorded.
LossBreakdown weighted_total(double response, const Vector& sensitivity,
                             std::span<const double> lambda);

/// |y_hat - y| / |y| over all validation responses stacked into one vector,
/// in original (unstandardized) units.
double relative_l2_error(const NetworkParams& params, const Dataset& val,
                         const StandardizationStats& stats);

}  // namespace sobnn
