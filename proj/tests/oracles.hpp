#pragma once

// Test-only reference implementations, deliberately independent of the
// library's adaptive machinery: fixed-step composite Simpson with Richardson
// extrapolation, and dense-sweep suprema.

#include <cmath>
#include <utility>

namespace oracle {

template <class F>
double simpson_fixed(F&& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s4 = 0.0, s2 = 0.0;
    for (int i = 1; i < n; i += 2) s4 += f(a + i * h);
    for (int i = 2; i < n; i += 2) s2 += f(a + i * h);
    return h / 3.0 * (f(a) + f(b) + 4.0 * s4 + 2.0 * s2);
}

/// Richardson-extrapolated composite Simpson: (16 S_{2n} - S_n) / 15.
template <class F>
double simpson_richardson(F&& f, double a, double b, int n) {
    const double s1 = simpson_fixed(f, a, b, n);
    const double s2 = simpson_fixed(f, a, b, 2 * n);
    return (16.0 * s2 - s1) / 15.0;
}

/// Dense-grid sweep of the running integral of f, step dt; returns
/// {max over the sweep, argmax}.
template <class F>
std::pair<double, double> sweep_sup_cumulative(F&& f, double t_end, double dt) {
    double acc = 0.0;
    double best = 0.0, best_t = 0.0;
    double prev = f(0.0);
    for (double t = dt; t <= t_end + 0.5 * dt; t += dt) {
        const double cur = f(t);
        acc += 0.5 * dt * (prev + cur);
        prev = cur;
        if (acc > best) {
            best = acc;
            best_t = t;
        }
    }
    return {best, best_t};
}

}  // namespace oracle
