#include "sobnn/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sobnn {

namespace {

using std::numbers::pi;

std::pair<double, Vector> eval_trig(const Vector& x) {
    const double s1 = std::sin(pi * x[0]);
    const double c1 = std::cos(pi * x[0]);
    const double s2 = std::sin(pi * x[1]);
    const double c2 = std::cos(pi * x[1]);
    return {s1 * c2, Vector{pi * c1 * c2, -pi * s1 * s2}};
}

// Three Gaussian bumps with distinct centers, widths and signs.
struct Bump {
    double amp;
    double cx, cy;
    double sigma;
};
constexpr Bump kBumps[] = {
    {1.0, -0.4, -0.4, 0.35},
    {-0.8, 0.5, 0.2, 0.45},
    {0.6, 0.1, 0.7, 0.25},
};

std::pair<double, Vector> eval_peaks(const Vector& x) {
    double y = 0.0;
    Vector g(2, 0.0);
    for (const Bump& b : kBumps) {
        const double dx = x[0] - b.cx;
        const double dy = x[1] - b.cy;
        const double s2 = b.sigma * b.sigma;
        const double e = b.amp * std::exp(-(dx * dx + dy * dy) / (2.0 * s2));
        y += e;
        g[0] += e * (-dx / s2);
        g[1] += e * (-dy / s2);
    }
    return {y, g};
}

std::pair<double, Vector> eval_ridge(const Vector& x) {
    const double t = std::tanh(3.0 * x[1]);
    return {x[0] * x[0] + t, Vector{2.0 * x[0], 3.0 * (1.0 - t * t)}};
}

AnalyticProblem make(const std::string& name,
                     std::pair<double, Vector> (*fn)(const Vector&)) {
    AnalyticProblem p;
    p.name = name;
    p.n_in = 2;
    p.domain.assign(2, {-1.0, 1.0});
    p.eval = fn;
    return p;
}

}  // namespace

AnalyticProblem builtin(const std::string& name) {
    if (name == "trig") return make("trig", eval_trig);
    if (name == "peaks") return make("peaks", eval_peaks);
    if (name == "ridge") return make("ridge", eval_ridge);
    throw std::invalid_argument("unknown builtin problem '" + name +
                                "' (available: trig, peaks, ridge)");
}

std::vector<std::string> builtin_names() { return {"trig", "peaks", "ridge"}; }

Dataset sample_grid(const AnalyticProblem& p, std::size_t points_per_axis) {
    if (points_per_axis < 2) throw std::invalid_argument("sample_grid: need >= 2 points per axis");
    if (p.domain.size() != p.n_in) throw std::invalid_argument("sample_grid: domain/n_in mismatch");

    std::size_t total = 1;
    for (std::size_t e = 0; e < p.n_in; ++e) total *= points_per_axis;

    Dataset d;
    d.samples.reserve(total);
    std::vector<std::size_t> idx(p.n_in, 0);
    for (std::size_t k = 0; k < total; ++k) {
        Vector x(p.n_in);
        for (std::size_t e = 0; e < p.n_in; ++e) {
            const auto [lo, hi] = p.domain[e];
            x[e] = lo + (hi - lo) * static_cast<double>(idx[e]) /
                            static_cast<double>(points_per_axis - 1);
        }
        auto [y, grad] = p.eval(x);
        SamplePoint s;
        s.x = std::move(x);
        s.y = {y};
        s.dy_dx = Matrix(1, p.n_in);
        for (std::size_t e = 0; e < p.n_in; ++e) s.dy_dx(0, e) = grad[e];
        d.samples.push_back(std::move(s));

        // row-major: last axis fastest
        for (std::size_t e = p.n_in; e-- > 0;) {
            if (++idx[e] < points_per_axis) break;
            idx[e] = 0;
        }
    }
    return d;
}

}  // namespace sobnn
