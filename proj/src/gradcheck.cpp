#include "sobnn/gradcheck.hpp"

#include <cmath>
#include <cstdio>

#include "sobnn/loss.hpp"
#include "sobnn/rng.hpp"

namespace sobnn {

namespace {

// Relative error with a unit floor so FD roundoff (~1e-10 absolute at
// h = 1e-6) cannot dominate near-zero components.
double rel_err(double got, double want) {
    const double scale = std::max({std::abs(got), std::abs(want), 1.0});
    return std::abs(got - want) / scale;
}

}  // namespace

double loss_at(const NetworkParams& params, const Vector& x, const Vector& y,
               const Matrix& jac_true, std::span<const double> lambda) {
    const ForwardCache cache = forward(params, x);
    const Matrix jac = input_jacobian(params, cache);
    const double e_resp = response_loss(cache.output(), y);
    const Vector e_sens = sensitivity_loss_per_input(jac, jac_true);
    return weighted_total(e_resp, e_sens, lambda).total_weighted;
}

Vector fd_param_gradient(const NetworkParams& params, const Vector& x, const Vector& y,
                         const Matrix& jac_true, std::span<const double> lambda, double h) {
    NetworkParams probe = params;
    Vector theta = params.flatten();
    Vector grad(theta.size());
    for (std::size_t p = 0; p < theta.size(); ++p) {
        const double orig = theta[p];
        theta[p] = orig + h;
        probe.set_flat(theta);
        const double hi = loss_at(probe, x, y, jac_true, lambda);
        theta[p] = orig - h;
        probe.set_flat(theta);
        const double lo = loss_at(probe, x, y, jac_true, lambda);
        theta[p] = orig;
        grad[p] = (hi - lo) / (2.0 * h);
    }
    return grad;
}

Matrix fd_input_jacobian(const NetworkParams& params, const Vector& x, double h) {
    Matrix jac(params.shape.n_out(), params.shape.n_in());
    Vector probe = x;
    for (std::size_t j = 0; j < x.size(); ++j) {
        probe[j] = x[j] + h;
        const Vector hi = forward(params, probe).output();
        probe[j] = x[j] - h;
        const Vector lo = forward(params, probe).output();
        probe[j] = x[j];
        for (std::size_t i = 0; i < hi.size(); ++i) jac(i, j) = (hi[i] - lo[i]) / (2.0 * h);
    }
    return jac;
}

std::string GradCheckReport::summary() const {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%zu checks: max jacobian rel err %.3e, max param-grad rel err %.3e -> %s",
                  checks, max_jacobian_rel_err, max_param_rel_err, passed ? "PASS" : "FAIL");
    return buf;
}

GradCheckReport run_gradcheck(const NetworkShape& shape, std::size_t checks, std::uint64_t seed,
                              double tolerance, double kink_guard) {
    shape.validate();
    Rng rng(seed);
    GradCheckReport report;
    report.checks = checks;

    const std::size_t n_in = shape.n_in();
    const std::size_t n_out = shape.n_out();

    for (std::size_t c = 0; c < checks; ++c) {
        // redraw until the sample is safely away from every ReLU kink
        NetworkParams params;
        Vector x(n_in);
        ForwardCache cache;
        for (;;) {
            params = init_params(shape, rng.below(UINT64_MAX));
            for (double& v : x) v = rng.uniform(-1.0, 1.0);
            cache = forward(params, x);
            if (cache.min_abs_hidden_preactivation() > kink_guard) break;
        }
        Vector y(n_out);
        for (double& v : y) v = rng.uniform(-1.5, 1.5);
        Matrix jac_true(n_out, n_in);
        for (double& v : jac_true.data) v = rng.uniform(-2.0, 2.0);
        Vector lambda(1 + n_in);
        for (double& v : lambda) v = rng.uniform(0.05, 2.0);

        const Matrix jac = input_jacobian(params, cache);
        const Matrix jac_fd = fd_input_jacobian(params, x);
        for (std::size_t i = 0; i < jac.data.size(); ++i) {
            report.max_jacobian_rel_err =
                std::max(report.max_jacobian_rel_err, rel_err(jac.data[i], jac_fd.data[i]));
        }

        Vector resid_y(n_out);
        for (std::size_t i = 0; i < n_out; ++i) resid_y[i] = cache.output()[i] - y[i];
        Matrix resid_jac = jac;
        for (std::size_t i = 0; i < resid_jac.data.size(); ++i)
            resid_jac.data[i] -= jac_true.data[i];
        const BackpropState bp = backprop(params, cache, resid_y, resid_jac, lambda);
        const Vector fd = fd_param_gradient(params, x, y, jac_true, lambda);
        for (std::size_t p = 0; p < fd.size(); ++p) {
            report.max_param_rel_err =
                std::max(report.max_param_rel_err, rel_err(bp.flat[p], fd[p]));
        }
    }

    report.passed =
        report.max_jacobian_rel_err <= tolerance && report.max_param_rel_err <= tolerance;
    return report;
}

}  // namespace sobnn
