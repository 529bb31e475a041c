#include "sobnn/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace sobnn {

double response_loss(const Vector& y_hat, const Vector& y) {
    if (y_hat.size() != y.size()) throw std::invalid_argument("response_loss: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y_hat[i] - y[i];
        s += r * r;
    }
    return 0.5 * s;
}

Vector sensitivity_loss_per_input(const Matrix& jac_hat, const Matrix& jac_true) {
    if (jac_hat.rows != jac_true.rows || jac_hat.cols != jac_true.cols) {
        throw std::invalid_argument("sensitivity_loss_per_input: dimension mismatch");
    }
    Vector out(jac_hat.cols, 0.0);
    for (std::size_t j = 0; j < jac_hat.cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < jac_hat.rows; ++i) {
            const double r = jac_hat(i, j) - jac_true(i, j);
            s += r * r;
        }
        out[j] = 0.5 * s;
    }
    return out;
}

LossBreakdown weighted_total(double response, const Vector& sensitivity,
                             std::span<const double> lambda) {
    if (lambda.size() != 1 + sensitivity.size()) {
        throw std::invalid_argument("weighted_total: lambda length must be 1 + n_in");
    }
    LossBreakdown b;
    b.response = response;
    b.sensitivity = sensitivity;
    b.lambda_used.assign(lambda.begin(), lambda.end());
    double total = lambda[0] * response;
    for (std::size_t j = 0; j < sensitivity.size(); ++j) total += lambda[1 + j] * sensitivity[j];
    b.total_weighted = total;
    return b;
}

double relative_l2_error(const NetworkParams& params, const Dataset& val,
                         const StandardizationStats& stats) {
    if (val.samples.empty()) throw std::invalid_argument("relative_l2_error: empty validation set");
    double num = 0.0;
    double den = 0.0;
    for (const auto& s : val.samples) {
        const ForwardCache cache = forward(params, s.x);
        const Vector& y_hat_s = cache.output();
        for (std::size_t i = 0; i < s.y.size(); ++i) {
            const double y_hat = y_hat_s[i] * stats.y_std[i] + stats.y_mean[i];
            const double y = s.y[i] * stats.y_std[i] + stats.y_mean[i];
            num += (y_hat - y) * (y_hat - y);
            den += y * y;
        }
    }
    if (!(den > 0.0)) {
        throw std::invalid_argument("relative_l2_error: validation responses are all zero");
    }
    return std::sqrt(num) / std::sqrt(den);
}

}  // namespace sobnn
