#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stabcert/expr.hpp"

namespace stabcert {

/// The coefficient triple (gamma, alpha, beta) with the nonlinearity
/// exponent p > 1. gamma may change sign; alpha and beta must be >= 0.
struct CoefficientProfile {
    TimeFunction gamma;
    TimeFunction alpha;
    TimeFunction beta;
    double p = 2.0;
};

/// User declaration about behavior beyond the numerical horizon. At most one
/// assertion is recorded; it is echoed verbatim into any certificate that
/// relies on it.
enum class TailAssertion { none, alpha_integrable, beta_integrable, gamma_sup_attained };

std::string to_string(TailAssertion tail);

struct Numerics {
    double quad_tol = 1e-9;
    int grid_points = 1024;  // table intervals
    double root_tol = 1e-7;  // bisection tolerance for blow-up times
};

struct ProblemSpec {
    CoefficientProfile profile;
    double g0 = 0.0;
    double horizon = 100.0;
    TailAssertion tail = TailAssertion::none;
    Numerics numerics;
};

/// Rejects invalid profiles by dense sampling over the evaluation grid:
/// negative alpha/beta, non-finite samples (singular integrands), p <= 1,
/// g0 < 0, horizon <= 0. Throws ValidationError.
void validate(const ProblemSpec& spec);

/// Convergence status of an improper integral truncated at the horizon.
/// The tail window is [horizon/2, horizon]; "diverging" means the tail-window
/// contribution grew compared to the preceding window of equal ratio.
enum class TailStatus { converged, asserted, inconclusive, diverging };

std::string to_string(TailStatus status);

struct ImproperIntegral {
    double value = 0.0;  // integral over [0, horizon]; may be +inf
    TailStatus status = TailStatus::inconclusive;
};

struct SupResult {
    double value = 0.0;
    double attained_at = 0.0;
    /// Set when the sup sits at the grid edge and is still climbing across
    /// the tail window: numerical evidence that the sup is infinite.
    bool unbounded_evidence = false;
    /// Set unless the user asserted the sup is attained within the horizon.
    bool tail_caveat = true;
};

/// Cached antiderivatives on a fixed grid over [0, horizon]:
///   Gamma(t)          = integral of gamma over [0, t]
///   IntAlpha/IntBeta  = plain cumulative integrals of alpha and beta
///   IntAlphaOverNu(t) = integral of alpha / nu^{p-1}, nu = exp(-Gamma)
///   IntBetaNu(t)      = integral of beta * nu
/// The last two are accumulated in log space so profiles that drive nu to
/// huge or tiny values stay evaluable. Off-grid queries integrate the short
/// remainder from the nearest grid node, so every value is accurate to the
/// build tolerance rather than an interpolation error.
class AntiderivativeTable {
public:
    static AntiderivativeTable build(const ProblemSpec& spec);

    std::span<const double> grid() const noexcept { return grid_; }
    std::span<const double> gamma_nodes() const noexcept { return gamma_; }
    double quad_tol() const noexcept { return quad_tol_; }

    double cumulative_gamma(double t) const;
    double int_alpha(double t) const;
    double int_beta(double t) const;
    double log_int_alpha_over_nu(double t) const;  // -inf at t = 0
    double int_alpha_over_nu(double t) const;      // may overflow to +inf
    double log_int_beta_nu(double t) const;
    double int_beta_nu(double t) const;

    /// Node values, for refinement-invariance tests.
    std::span<const double> int_alpha_over_nu_nodes_log() const noexcept { return log_k_; }
    std::span<const double> int_beta_nu_nodes_log() const noexcept { return log_j_; }

private:
    friend class Problem;
    AntiderivativeTable() = default;

    std::size_t segment_of(double t) const;

    CoefficientProfile profile_;
    double horizon_ = 0.0;
    double quad_tol_ = 1e-9;
    std::vector<double> grid_;
    std::vector<double> gamma_;  // Gamma at nodes
    std::vector<double> int_alpha_;
    std::vector<double> int_beta_;
    std::vector<double> log_k_;  // log IntAlphaOverNu at nodes
    std::vector<double> log_j_;  // log IntBetaNu at nodes
};

/// A validated ProblemSpec paired with its antiderivative table. Immutable
/// after construction; all evaluation is read-only and thread-safe.
class Problem {
public:
    explicit Problem(ProblemSpec spec);

    const ProblemSpec& spec() const noexcept { return spec_; }
    const AntiderivativeTable& table() const noexcept { return table_; }

    double horizon() const noexcept { return spec_.horizon; }
    double g0() const noexcept { return spec_.g0; }
    double p() const noexcept { return spec_.profile.p; }
    double quad_tol() const noexcept { return spec_.numerics.quad_tol; }

    double gamma(double t) const { return spec_.profile.gamma(t); }
    double alpha(double t) const { return spec_.profile.alpha(t); }
    double beta(double t) const { return spec_.profile.beta(t); }

    /// Gamma(t) = integral of gamma over [0, t], absolute error <= quad_tol.
    double cumulative_gamma(double t) const;

    /// log nu(t) = -Gamma(t); always finite.
    double log_nu(double t) const { return -cumulative_gamma(t); }

    /// nu(t) = exp(-Gamma(t)); nu(0) = 1 exactly. Throws OverflowGuardError
    /// when the result leaves double range; use log_nu then.
    double nu(double t) const;

    double log_mu(double eps, double t) const;

    /// mu(t) = nu(t) * exp(-eps^{p-1} * IntAlpha(t)). Same overflow contract
    /// as nu.
    double mu(double eps, double t) const;

    double int_alpha(double t) const { return table_.int_alpha(t); }
    double int_beta(double t) const { return table_.int_beta(t); }
    double int_alpha_over_nu(double t) const { return table_.int_alpha_over_nu(t); }
    double log_int_beta_nu(double t) const { return table_.log_int_beta_nu(t); }

    /// M = sup of Gamma over the grid, refined by golden-section search in
    /// the bracketing interval.
    SupResult sup_cumulative_gamma() const;

    /// L-style sup of |Gamma|.
    SupResult sup_abs_cumulative_gamma() const;

    /// Integral of alpha / nu^{p-1} over [0, horizon] with tail diagnosis.
    /// Returned without the (p-1) factor; callers multiply.
    ImproperIntegral improper_integral_alpha_over_nu() const;

    ImproperIntegral improper_integral_alpha() const;
    ImproperIntegral improper_integral_beta() const;

private:
    ProblemSpec spec_;
    AntiderivativeTable table_;
};

/// log(exp(a) + exp(b)) without overflow.
double logaddexp(double a, double b) noexcept;

namespace detail {
/// Golden-section maximization on [a, b] for a locally unimodal bracket.
double golden_max(const std::function<double(double)>& f, double a, double b);
}  // namespace detail

/// The grid used by tables and validation: uniform up to horizon 200, then a
/// uniform head on [0, 100] plus a geometric tail so large-horizon decay
/// evidence keeps dense early sampling.
std::vector<double> make_grid(double horizon, int intervals);

}  // namespace stabcert
