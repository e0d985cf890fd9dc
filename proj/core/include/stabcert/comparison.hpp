#pragma once

#include <optional>
#include <vector>

#include "stabcert/coefficients.hpp"
#include "stabcert/rk45.hpp"

namespace stabcert {

struct BlowupEvent {
    double time = 0.0;
    double threshold = 0.0;
    // the true blow-up time is bracketed by the last two accepted steps
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

/// Time-stamped samples of the scalar comparison solution g(t).
struct ScalarTrajectory {
    std::vector<double> times;
    std::vector<double> values;
    std::optional<BlowupEvent> blowup;
    IntegratorStats stats;
};

/// Integrates dg/dt = gamma(t) g + alpha(t) g^p + beta(t), the equality
/// version of the comparison inequality; it majorizes every solution of the
/// inequality with the same data. Adaptive Dormand-Prince 5(4) with step
/// rejection; terminates early with a blow-up event when g crosses
/// cfg.blowup_threshold. t_end <= 0 means integrate to the spec horizon.
ScalarTrajectory integrate_comparison(const Problem& problem, const IntegratorConfig& cfg,
                                      double t_end = 0.0);

struct BernoulliValue {
    double value = 0.0;
    bool blown_up = false;  // the closed-form denominator reached zero before t
};

/// Closed-form solution of dg/dt = gamma g + alpha g^p (beta must vanish):
///   g(t) = (1/nu(t)) * (g0^{1-p} - (p-1) * IntAlphaOverNu(t))^{-1/(p-1)}.
/// Throws ProfileHasBetaError when beta is not identically zero and
/// ZeroInitialNormError when g0 = 0.
BernoulliValue exact_bernoulli(const Problem& problem, double t);

/// First time at which the closed-form denominator vanishes, found by
/// bisection on the monotone antiderivative table; nullopt when the integral
/// stays below g0^{1-p}/(p-1) within the horizon.
std::optional<double> bernoulli_blowup_time(const Problem& problem);

struct OracleAgreement {
    double max_rel_error = 0.0;  // over the shared 100-point grid
    bool integrator_blowup = false;
    bool bernoulli_blowup = false;
    std::optional<double> blowup_time_diff;
};

/// Primary self-test of the integrator: compares integrate_comparison against
/// exact_bernoulli on a 100-point grid. Requires beta == 0.
OracleAgreement verify_oracle_agreement(const Problem& problem, const IntegratorConfig& cfg);

}  // namespace stabcert
