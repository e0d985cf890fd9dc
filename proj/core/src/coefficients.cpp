#include "stabcert/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "stabcert/errors.hpp"
#include "stabcert/quadrature.hpp"

namespace stabcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogGuard = 709.0;  // exp() overflow threshold for double

double clamp_exp(double x) { return std::exp(std::min(x, kLogGuard)); }

// Evidence that a sampled sequence is still climbing at the end of the grid:
// argmax at the edge and a clear rise across the tail window.
bool edge_climbing(std::span<const double> values, std::size_t argmax, std::size_t mid_idx) {
    const std::size_t last = values.size() - 1;
    if (argmax + 1 < last) return false;
    const double rise = values[last] - values[mid_idx];
    return rise > 1e-9 + 1e-6 * std::abs(values[last]);
}

ImproperIntegral tail_diagnose(double full, double half, double quarter, double quad_tol,
                               bool asserted) {
    ImproperIntegral out;
    out.value = full;
    if (!std::isfinite(full)) {
        out.status = TailStatus::diverging;
        return out;
    }
    if (asserted) {
        out.status = TailStatus::asserted;
        return out;
    }
    const double c2 = full - half;
    const double c1 = half - quarter;
    if (c2 <= quad_tol)
        out.status = TailStatus::converged;
    else if (c2 > 1.1 * c1 + quad_tol)
        out.status = TailStatus::diverging;
    else
        out.status = TailStatus::inconclusive;
    return out;
}

}  // namespace

namespace detail {

double golden_max(const std::function<double(double)>& f, double a, double b) {
    constexpr double r = 0.6180339887498949;
    double x1 = b - r * (b - a);
    double x2 = a + r * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 60 && (b - a) > 1e-12 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    return f1 > f2 ? x1 : x2;
}

}  // namespace detail

std::string to_string(TailAssertion tail) {
    switch (tail) {
        case TailAssertion::none: return "none";
        case TailAssertion::alpha_integrable: return "alpha_integrable";
        case TailAssertion::beta_integrable: return "beta_integrable";
        case TailAssertion::gamma_sup_attained: return "gamma_sup_attained";
    }
    return "none";
}

std::string to_string(TailStatus status) {
    switch (status) {
        case TailStatus::converged: return "converged";
        case TailStatus::asserted: return "user_asserted";
        case TailStatus::inconclusive: return "inconclusive";
        case TailStatus::diverging: return "diverging";
    }
    return "inconclusive";
}

double logaddexp(double a, double b) noexcept {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

std::vector<double> make_grid(double horizon, int intervals) {
    const int n = std::max(intervals, 16);
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n) + 1);
    if (horizon <= 200.0) {
        for (int i = 0; i <= n; ++i)
            grid.push_back(horizon * static_cast<double>(i) / n);
    } else {
        const double head_end = 100.0;
        const int head = std::max(8, static_cast<int>(std::ceil(0.6 * n)));
        const int tail = std::max(8, n - head);
        for (int i = 0; i < head; ++i)
            grid.push_back(head_end * static_cast<double>(i) / head);
        const double ratio = std::log(horizon / head_end);
        for (int j = 0; j <= tail; ++j)
            grid.push_back(head_end * std::exp(ratio * static_cast<double>(j) / tail));
    }
    grid.front() = 0.0;
    grid.back() = horizon;
    return grid;
}

void validate(const ProblemSpec& spec) {
    if (!spec.profile.gamma.valid() || !spec.profile.alpha.valid() || !spec.profile.beta.valid())
        throw ValidationError("profile functions gamma, alpha, beta must all be set");
    if (!(spec.profile.p > 1.0))
        throw ValidationError("exponent p must be > 1, got " + std::to_string(spec.profile.p));
    if (!(spec.g0 >= 0.0))
        throw ValidationError("g0 must be >= 0, got " + std::to_string(spec.g0));
    if (!(spec.horizon > 0.0))
        throw ValidationError("horizon must be > 0");
    if (!(spec.numerics.quad_tol > 0.0))
        throw ValidationError("quad_tol must be > 0");

    const auto grid = make_grid(spec.horizon, std::min(spec.numerics.grid_points, 4096));
    const auto check = [&](const TimeFunction& f, const char* name, bool nonneg) {
        const auto probe = [&](double t) {
            const double v = f(t);
            if (!std::isfinite(v))
                throw ValidationError(std::string(name) + " is not finite at t=" +
                                      std::to_string(t) + " (singular profiles are rejected)");
            if (nonneg && v < -1e-12)
                throw ValidationError(std::string(name) + " must be nonnegative, got " +
                                      std::to_string(v) + " at t=" + std::to_string(t));
        };
        for (std::size_t i = 0; i < grid.size(); ++i) {
            probe(grid[i]);
            if (i + 1 < grid.size()) probe(0.5 * (grid[i] + grid[i + 1]));
        }
    };
    check(spec.profile.gamma, "gamma", false);
    check(spec.profile.alpha, "alpha", true);
    check(spec.profile.beta, "beta", true);
}

// ---------------------------------------------------------------------------
// AntiderivativeTable
// ---------------------------------------------------------------------------

AntiderivativeTable AntiderivativeTable::build(const ProblemSpec& spec) {
    AntiderivativeTable tab;
    tab.profile_ = spec.profile;
    tab.horizon_ = spec.horizon;
    tab.quad_tol_ = spec.numerics.quad_tol;
    tab.grid_ = make_grid(spec.horizon, spec.numerics.grid_points);

    const std::size_t n = tab.grid_.size();
    tab.gamma_.assign(n, 0.0);
    tab.int_alpha_.assign(n, 0.0);
    tab.int_beta_.assign(n, 0.0);
    tab.log_k_.assign(n, -kInf);
    tab.log_j_.assign(n, -kInf);

    const auto& gamma = spec.profile.gamma;
    const auto& alpha = spec.profile.alpha;
    const auto& beta = spec.profile.beta;
    const double pm1 = spec.profile.p - 1.0;

    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = tab.grid_[i];
        const double b = tab.grid_[i + 1];
        const double seg_tol = 0.5 * tab.quad_tol_ * (b - a) / tab.horizon_;
        QuadratureOptions seg_opts;
        seg_opts.abs_tol = seg_tol;

        const double g0 = tab.gamma_[i];
        tab.gamma_[i + 1] = g0 + integrate(gamma, a, b, seg_opts);
        tab.int_alpha_[i + 1] = tab.int_alpha_[i] + integrate(alpha, a, b, seg_opts);
        tab.int_beta_[i + 1] = tab.int_beta_[i] + integrate(beta, a, b, seg_opts);

        QuadratureOptions inner_opts;
        inner_opts.abs_tol = tab.quad_tol_;
        const auto gamma_cum = [&](double xi) {
            return g0 + integrate(gamma, a, xi, inner_opts);
        };
        const auto scaled_segment = [&](auto&& weight, double shift) {
            QuadratureOptions opts;
            opts.abs_tol = std::min(seg_tol * clamp_exp(-shift), 1e300);
            opts.rel_floor = 1e-13;
            const double s = integrate(weight, a, b, opts);
            return s > 0.0 ? shift + std::log(s) : -kInf;
        };

        // segment of IntAlphaOverNu: alpha * exp((p-1)*Gamma), log-accumulated
        const double mk = pm1 * std::max(g0, tab.gamma_[i + 1]);
        const double log_sk = scaled_segment(
            [&](double xi) { return alpha(xi) * clamp_exp(pm1 * gamma_cum(xi) - mk); }, mk);
        tab.log_k_[i + 1] = logaddexp(tab.log_k_[i], log_sk);

        // segment of IntBetaNu: beta * exp(-Gamma)
        const double mj = std::max(-g0, -tab.gamma_[i + 1]);
        const double log_sj = scaled_segment(
            [&](double xi) { return beta(xi) * clamp_exp(-gamma_cum(xi) - mj); }, mj);
        tab.log_j_[i + 1] = logaddexp(tab.log_j_[i], log_sj);
    }
    return tab;
}

std::size_t AntiderivativeTable::segment_of(double t) const {
    const double slack = 1e-9 * (1.0 + horizon_);
    if (!(t >= -slack) || t > horizon_ + slack)
        throw TimeOutOfRangeError("t=" + std::to_string(t) + " outside [0, " +
                                  std::to_string(horizon_) + "]");
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    const std::size_t idx = static_cast<std::size_t>(it - grid_.begin());
    return std::min(idx > 0 ? idx - 1 : 0, grid_.size() - 2);
}

double AntiderivativeTable::cumulative_gamma(double t) const {
    const std::size_t i = segment_of(t);
    if (t == grid_[i]) return gamma_[i];
    QuadratureOptions opts;
    opts.abs_tol = 0.5 * quad_tol_;
    return gamma_[i] + integrate(profile_.gamma, grid_[i], t, opts);
}

double AntiderivativeTable::int_alpha(double t) const {
    const std::size_t i = segment_of(t);
    if (t == grid_[i]) return int_alpha_[i];
    QuadratureOptions opts;
    opts.abs_tol = 0.5 * quad_tol_;
    return int_alpha_[i] + integrate(profile_.alpha, grid_[i], t, opts);
}

double AntiderivativeTable::int_beta(double t) const {
    const std::size_t i = segment_of(t);
    if (t == grid_[i]) return int_beta_[i];
    QuadratureOptions opts;
    opts.abs_tol = 0.5 * quad_tol_;
    return int_beta_[i] + integrate(profile_.beta, grid_[i], t, opts);
}

double AntiderivativeTable::log_int_alpha_over_nu(double t) const {
    const std::size_t i = segment_of(t);
    if (t == grid_[i]) return log_k_[i];
    const double pm1 = profile_.p - 1.0;
    const double a = grid_[i];
    const double g0 = gamma_[i];
    QuadratureOptions inner_opts;
    inner_opts.abs_tol = quad_tol_;
    const double gt = g0 + integrate(profile_.gamma, a, t, inner_opts);
    const double m = pm1 * std::max(g0, gt);
    QuadratureOptions opts;
    opts.abs_tol = std::min(0.5 * quad_tol_ * clamp_exp(-m), 1e300);
    opts.rel_floor = 1e-13;
    const double s = integrate(
        [&](double xi) {
            const double g = g0 + integrate(profile_.gamma, a, xi, inner_opts);
            return profile_.alpha(xi) * clamp_exp(pm1 * g - m);
        },
        a, t, opts);
    return logaddexp(log_k_[i], s > 0.0 ? m + std::log(s) : -kInf);
}

double AntiderivativeTable::int_alpha_over_nu(double t) const {
    return std::exp(log_int_alpha_over_nu(t));  // may overflow to +inf, deliberately
}

double AntiderivativeTable::log_int_beta_nu(double t) const {
    const std::size_t i = segment_of(t);
    if (t == grid_[i]) return log_j_[i];
    const double a = grid_[i];
    const double g0 = gamma_[i];
    QuadratureOptions inner_opts;
    inner_opts.abs_tol = quad_tol_;
    const double gt = g0 + integrate(profile_.gamma, a, t, inner_opts);
    const double m = std::max(-g0, -gt);
    QuadratureOptions opts;
    opts.abs_tol = std::min(0.5 * quad_tol_ * clamp_exp(-m), 1e300);
    opts.rel_floor = 1e-13;
    const double s = integrate(
        [&](double xi) {
            const double g = g0 + integrate(profile_.gamma, a, xi, inner_opts);
            return profile_.beta(xi) * clamp_exp(-g - m);
        },
        a, t, opts);
    return logaddexp(log_j_[i], s > 0.0 ? m + std::log(s) : -kInf);
}

double AntiderivativeTable::int_beta_nu(double t) const {
    return std::exp(log_int_beta_nu(t));
}

// ---------------------------------------------------------------------------
// Problem
// ---------------------------------------------------------------------------

Problem::Problem(ProblemSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
    table_ = AntiderivativeTable::build(spec_);
}

double Problem::cumulative_gamma(double t) const { return table_.cumulative_gamma(t); }

double Problem::nu(double t) const {
    const double log_nu_t = log_nu(t);
    if (std::abs(log_nu_t) > kLogGuard)
        throw OverflowGuardError("nu(t) outside double range at t=" + std::to_string(t) +
                                 "; evaluate log_nu instead");
    return std::exp(log_nu_t);
}

double Problem::log_mu(double eps, double t) const {
    const double pm1 = p() - 1.0;
    return -(cumulative_gamma(t) + std::pow(eps, pm1) * int_alpha(t));
}

double Problem::mu(double eps, double t) const {
    const double lm = log_mu(eps, t);
    if (std::abs(lm) > kLogGuard)
        throw OverflowGuardError("mu(t) outside double range at t=" + std::to_string(t) +
                                 "; evaluate log_mu instead");
    return std::exp(lm);
}

namespace {

SupResult sup_over_grid(const AntiderivativeTable& tab,
                        const std::function<double(double)>& f,
                        std::span<const double> node_values, bool asserted_attained) {
    const auto grid = tab.grid();
    std::size_t best = 0;
    for (std::size_t i = 1; i < node_values.size(); ++i)
        if (node_values[i] > node_values[best]) best = i;

    const double lo = grid[best > 0 ? best - 1 : 0];
    const double hi = grid[std::min(best + 1, grid.size() - 1)];
    SupResult out;
    out.value = node_values[best];
    out.attained_at = grid[best];
    if (hi > lo) {
        const double x = detail::golden_max(f, lo, hi);
        const double fx = f(x);
        if (fx > out.value) {
            out.value = fx;
            out.attained_at = x;
        }
    }

    // midpoint of the tail window [horizon/2, horizon]
    const double mid_t = 0.5 * grid.back();
    std::size_t mid_idx = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] <= mid_t) mid_idx = i;
    out.unbounded_evidence = edge_climbing(node_values, best, mid_idx);
    out.tail_caveat = !asserted_attained;
    return out;
}

}  // namespace

SupResult Problem::sup_cumulative_gamma() const {
    return sup_over_grid(
        table_, [this](double t) { return cumulative_gamma(t); }, table_.gamma_nodes(),
        spec_.tail == TailAssertion::gamma_sup_attained);
}

SupResult Problem::sup_abs_cumulative_gamma() const {
    std::vector<double> abs_nodes(table_.gamma_nodes().begin(), table_.gamma_nodes().end());
    for (double& v : abs_nodes) v = std::abs(v);
    return sup_over_grid(
        table_, [this](double t) { return std::abs(cumulative_gamma(t)); }, abs_nodes,
        spec_.tail == TailAssertion::gamma_sup_attained);
}

ImproperIntegral Problem::improper_integral_alpha_over_nu() const {
    const double T = horizon();
    return tail_diagnose(table_.int_alpha_over_nu(T), table_.int_alpha_over_nu(0.5 * T),
                         table_.int_alpha_over_nu(0.25 * T), quad_tol(),
                         spec_.tail == TailAssertion::alpha_integrable);
}

ImproperIntegral Problem::improper_integral_alpha() const {
    const double T = horizon();
    return tail_diagnose(table_.int_alpha(T), table_.int_alpha(0.5 * T),
                         table_.int_alpha(0.25 * T), quad_tol(),
                         spec_.tail == TailAssertion::alpha_integrable);
}

ImproperIntegral Problem::improper_integral_beta() const {
    const double T = horizon();
    return tail_diagnose(table_.int_beta(T), table_.int_beta(0.5 * T),
                         table_.int_beta(0.25 * T), quad_tol(),
                         spec_.tail == TailAssertion::beta_integrable);
}

}  // namespace stabcert
