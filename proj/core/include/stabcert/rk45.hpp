#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "stabcert/errors.hpp"

namespace stabcert {

/// Shared controls for the scalar and vector integrators.
struct IntegratorConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    double max_step = 0.0;  // 0: no cap beyond the remaining span
    double blowup_threshold = 1e12;
    bool dense_output = true;
    int dense_samples = 1001;
};

struct IntegratorStats {
    long steps = 0;
    long rejected = 0;
    long rhs_evals = 0;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
namespace dp {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dp

/// State-type hooks for the generic stepper. Specialized for double here and
/// for Eigen vectors in the systems module.
template <class State>
struct StateOps;

template <>
struct StateOps<double> {
    static double error_norm(double err, double y0, double y1, double atol, double rtol) {
        if (err == 0.0) return 0.0;
        const double scale = atol + rtol * std::max(std::abs(y0), std::abs(y1));
        return std::abs(err) / scale;
    }
    static double magnitude(double y) { return std::abs(y); }
    static bool admissible(double y) { return y >= 0.0; }
    static double project(double y) { return std::max(y, 0.0); }
};

/// One accepted Dormand-Prince step. `sink` is called as
/// sink(t0, y0, f0, t1, y1, f1) after each accepted step and may return false
/// to stop the run (events, blow-up).
template <class State, class RHS, class Sink>
IntegratorStats rk45_drive(RHS&& rhs, double t0, State y0, double t_end,
                           const IntegratorConfig& cfg, Sink&& sink) {
    using Ops = StateOps<State>;
    namespace dp = detail::dp;

    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
        throw ValidationError("integrator tolerances must be positive");
    if (!(cfg.blowup_threshold > 1.0))
        throw ValidationError("blowup_threshold must be > 1");

    IntegratorStats stats;
    const double span = t_end - t0;
    if (span <= 0.0) return stats;
    const double h_min = 1e-14 * std::max(span, 1.0);
    const double h_cap = cfg.max_step > 0.0 ? cfg.max_step : span;

    double t = t0;
    State y = y0;
    State f = rhs(t, y);
    ++stats.rhs_evals;
    double h = std::min({0.01 * span, h_cap, span});
    long forced_steps = 0;

    while (t < t_end) {
        h = std::min(h, t_end - t);
        bool underflow_clamp = false;
        if (h < h_min) {
            if (t_end - t <= h_min) {
                h = t_end - t;  // final snap, not an underflow
            } else {
                h = h_min;
                underflow_clamp = true;
            }
        }

        const State k1 = f;
        const State k2 = rhs(t + dp::c2 * h, State(y + h * (dp::a21 * k1)));
        const State k3 = rhs(t + dp::c3 * h, State(y + h * (dp::a31 * k1 + dp::a32 * k2)));
        const State k4 =
            rhs(t + dp::c4 * h, State(y + h * (dp::a41 * k1 + dp::a42 * k2 + dp::a43 * k3)));
        const State k5 = rhs(t + dp::c5 * h, State(y + h * (dp::a51 * k1 + dp::a52 * k2 +
                                                            dp::a53 * k3 + dp::a54 * k4)));
        const State k6 =
            rhs(t + h, State(y + h * (dp::a61 * k1 + dp::a62 * k2 + dp::a63 * k3 +
                                      dp::a64 * k4 + dp::a65 * k5)));
        State y_new = y + h * (dp::b1 * k1 + dp::b3 * k3 + dp::b4 * k4 + dp::b5 * k5 +
                               dp::b6 * k6);
        const State k7 = rhs(t + h, y_new);
        stats.rhs_evals += 6;

        const State err = h * (dp::e1 * k1 + dp::e3 * k3 + dp::e4 * k4 + dp::e5 * k5 +
                               dp::e6 * k6 + dp::e7 * k7);
        const double err_norm = Ops::error_norm(err, y, y_new, cfg.abs_tol, cfg.rel_tol);

        bool accept = err_norm <= 1.0;
        if (accept && !Ops::admissible(y_new)) {
            if (h > 4.0 * h_min) {
                accept = false;
            } else {
                y_new = Ops::project(y_new);
            }
        }

        if (!accept) {
            if (underflow_clamp) {
                // Error control is unattainable at the floor step. Push through
                // so a genuine blow-up can reach the threshold (the sink stops
                // the run there); a singularity that never grows past the
                // threshold exhausts the forced-step budget instead.
                if (++forced_steps > 1000000)
                    throw StepUnderflowError(
                        "step size collapsed below 1e-14 * span at t=" +
                        std::to_string(t) + " (near-singularity)");
                if (!Ops::admissible(y_new)) y_new = Ops::project(y_new);
                accept = true;
            } else {
                ++stats.rejected;
                const double shrink =
                    err_norm > 1.0 ? std::max(0.2, 0.9 * std::pow(err_norm, -0.2)) : 0.5;
                h *= shrink;
                continue;
            }
        }

        ++stats.steps;
        const double t_new = t + h;
        const bool keep_going = sink(t, y, k1, t_new, y_new, k7);
        t = t_new;
        y = y_new;
        f = k7;  // FSAL
        if (!keep_going) break;

        // standard controller: 0.9 safety, growth clamped to 5x
        double grow = 5.0;
        if (std::isfinite(err_norm) && err_norm > 0.0)
            grow = std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
        else if (!std::isfinite(err_norm))
            grow = 0.2;
        h = std::min(h * grow, h_cap);
    }
    return stats;
}

/// Cubic Hermite interpolation on one accepted step (4th-order dense output).
template <class State>
State hermite(double t0, const State& y0, const State& f0, double t1, const State& y1,
              const State& f1, double t) {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return State(h00 * y0 + (h10 * h) * f0 + h01 * y1 + (h11 * h) * f1);
}

}  // namespace detail
}  // namespace stabcert
