#pragma once

#include <cmath>
#include <string>

#include "stabcert/errors.hpp"

namespace stabcert {

/// Adaptive composite Simpson with interval bisection. Termination is on the
/// classic |S_fine - S_coarse| <= 15*tol estimate with Richardson correction.
/// The absolute tolerance is floored by a small relative term so integrals of
/// very large magnitude (divergent-tail probes) terminate at machine-level
/// relative accuracy instead of subdividing forever.
struct QuadratureOptions {
    double abs_tol = 1e-9;
    double rel_floor = 1e-12;
    long max_subdivisions = 1L << 20;
};

namespace detail {

template <class F>
double simpson_adapt(F& f, double a, double m, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth, long& budget,
                     const QuadratureOptions& opts) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    if (!std::isfinite(flm) || !std::isfinite(frm))
        throw QuadratureDivergenceError("integrand not finite near t=" +
                                        std::to_string(!std::isfinite(flm) ? lm : rm));
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double refined = left + right;
    const double err = refined - whole;
    const double accept = 15.0 * (tol + opts.rel_floor * std::abs(refined));
    if (std::abs(err) <= accept || depth <= 0) {
        if (depth <= 0 && std::abs(err) > accept)
            throw QuadratureDivergenceError("quadrature failed to converge on [" +
                                            std::to_string(a) + ", " + std::to_string(b) + "]");
        return refined + err / 15.0;
    }
    budget -= 2;
    if (budget <= 0)
        throw QuadratureDivergenceError("quadrature subdivision cap exceeded");
    return simpson_adapt(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget, opts) +
           simpson_adapt(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1, budget, opts);
}

}  // namespace detail

template <class F>
double integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb))
        throw QuadratureDivergenceError("integrand not finite on [" + std::to_string(a) +
                                        ", " + std::to_string(b) + "]");
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    long budget = opts.max_subdivisions;
    // depth 48 bounds the recursion; the subdivision budget is the real cap
    return sign * detail::simpson_adapt(f, a, m, b, fa, fm, fb, whole, opts.abs_tol, 48,
                                        budget, opts);
}

}  // namespace stabcert
