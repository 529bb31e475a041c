#pragma once

#include <span>
#include <vector>

#include "sobnn/mathcore.hpp"
#include "sobnn/optim.hpp"

namespace sobnn {

// Residual-weight modes:
//   1  minimize weighted total loss          2  maximize weighted total loss
//   3  minimize |total gradient|             4  maximize |total gradient|
//   5  minimize variance of weighted losses
//   6  minimize cosine distance of each weighted per-loss gradient to the
//      total gradient                        7  minimize its squared cosine
//   8  minimize cosine distance of each weighted sensitivity gradient to
//      the weighted response gradient        9  minimize its squared cosine
//   10 fixed all-ones (Sobolev baseline)     11 fixed response-only
//   12 per-epoch decay of sensitivity weights
//   13 per-epoch growth of sensitivity weights
constexpr int kFirstAdaptiveMode = 1;
constexpr int kLastAdaptiveMode = 9;
constexpr int kModeSobolev = 10;
constexpr int kModeResponseOnly = 11;
constexpr int kModeScheduledDecay = 12;
constexpr int kModeScheduledGrowth = 13;

inline bool is_adaptive_mode(int mode) {
    return mode >= kFirstAdaptiveMode && mode <= kLastAdaptiveMode;
}
inline bool is_scheduled_mode(int mode) {
    return mode == kModeScheduledDecay || mode == kModeScheduledGrowth;
}
inline bool is_valid_mode(int mode) { return mode >= 1 && mode <= 13; }

/// Weight vector layout: [response, input 1, ..., input n_in].
struct ResidualWeightState {
    int mode = kModeSobolev;
    double epsilon0 = 0.01;
    double schedule_rate = 0.01;  // per-epoch rate for modes 12-13
    Vector raw;                   // pre-clamp weights (adaptive modes)
    Vector clamped;               // weights applied to the loss
    AdamState moments;            // optimizer state for raw (adaptive modes)
};

/// Bounded remap of raw weights into (eps0, 2 + eps0), strictly increasing:
/// 1 - erf((1.2 - raw)/sqrt(3)) + eps0 elementwise.
Vector clamp_map(const Vector& raw, double eps0);
double clamp_map_scalar(double raw, double eps0);

/// d clamped / d raw = (2/sqrt(3*pi)) * exp(-(1.2 - raw)^2 / 3).
double clamp_derivative(double raw);

/// Constant weights: mode 10 all ones, mode 11 response only.
ResidualWeightState fixed_state(int mode, std::size_t n_in);

/// Initial state for any mode 1-13. Adaptive modes start at raw = 1.2
/// (clamped 1 + eps0); mode 12 starts at all ones, mode 13 at response 1
/// with sensitivity weights eps0.
ResidualWeightState initial_state(int mode, std::size_t n_in, double eps0 = 0.01,
                                  double schedule_rate = 0.01);

/// Per-iteration curvature-free inputs for the weighting objectives:
/// minibatch-mean loss components and per-loss flat gradients, plus their
/// Gram matrix so objective evaluations cost O(k^2) dot products.
struct WeightingContext {
    Vector loss_components;              // [E_resp, E_sens_1, ...]
    std::vector<Vector> per_loss_grads;  // same order
    Matrix gram;                         // gram(i,j) = g_i . g_j
    Vector total_grad;                   // sum_i lambda_i g_i at build time

    static WeightingContext build(Vector loss_components, std::vector<Vector> per_loss_grads,
                                  std::span<const double> lambda);
};

/// Objective value G(lambda) for adaptive modes 1-9; maximization rows are
/// negated so every mode is a minimization.
double objective(int mode, const WeightingContext& ctx, std::span<const double> lambda);

/// dG/d(raw): central differences of the objective w.r.t. each clamped
/// weight (h = 1e-6) chained through the clamp derivative. Reuses the
/// cached gradients; no network passes.
Vector lambda_gradient(int mode, const WeightingContext& ctx, const ResidualWeightState& state);

/// One ADAM step on raw followed by re-clamping (modes 1-9).
ResidualWeightState update_adaptive(ResidualWeightState state, const WeightingContext& ctx,
                                    const AdamConfig& cfg);

/// Per-epoch schedule for modes 12-13; the response weight stays at 1.
/// Applied once with the 1-based epoch index:
///   mode 12: w <- w / (1 + rate*epoch)
///   mode 13: w <- w * (1 + rate*epoch)
ResidualWeightState update_scheduled(ResidualWeightState state, std::size_t epoch);

}  // namespace sobnn
