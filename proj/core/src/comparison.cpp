#include "stabcert/comparison.hpp"

#include <algorithm>
#include <cmath>

#include "stabcert/errors.hpp"

namespace stabcert {

namespace {

bool beta_is_zero(const Problem& pb) { return !(pb.int_beta(pb.horizon()) > 0.0); }

double locate_crossing(double ta, double ya, double fa, double tb, double yb, double fb,
                       double threshold) {
    if (!std::isfinite(yb) || !std::isfinite(fb)) return tb;  // jumped past the singularity
    double lo = ta, hi = tb;
    for (int i = 0; i < 80 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        (detail::hermite(ta, ya, fa, tb, yb, fb, mid) > threshold ? hi : lo) = mid;
    }
    return hi;
}

// Dense sampler: emits interpolated values on a uniform grid as accepted
// steps stream in. Also locates a threshold crossing inside a step.
class DenseRecorder {
public:
    DenseRecorder(ScalarTrajectory& out, double t0, double t_end, int samples,
                  double threshold)
        : out_(out), t0_(t0), t_end_(t_end), samples_(std::max(samples, 2)),
          threshold_(threshold) {}

    bool on_step(double ta, double ya, double fa, double tb, double yb, double fb) {
        while (next_ < samples_) {
            const double ts = t0_ + (t_end_ - t0_) * next_ / (samples_ - 1);
            if (ts > tb + 1e-15 * std::max(1.0, std::abs(tb))) break;
            const double v = ts <= ta ? ya
                                      : detail::hermite(ta, ya, fa, tb, yb, fb,
                                                        std::min(ts, tb));
            out_.times.push_back(ts);
            out_.values.push_back(v);
            ++next_;
        }
        if (yb > threshold_) {
            BlowupEvent ev;
            ev.threshold = threshold_;
            ev.bracket_lo = ta;
            ev.bracket_hi = tb;
            ev.time = locate_crossing(ta, ya, fa, tb, yb, fb, threshold_);
            out_.times.push_back(ev.time);
            out_.values.push_back(std::max(yb, threshold_));
            out_.blowup = ev;
            return false;
        }
        return true;
    }

private:
    ScalarTrajectory& out_;
    double t0_, t_end_;
    int samples_;
    double threshold_;
    int next_ = 0;
};

}  // namespace

ScalarTrajectory integrate_comparison(const Problem& problem, const IntegratorConfig& cfg,
                                      double t_end) {
    const double T = t_end > 0.0 ? std::min(t_end, problem.horizon()) : problem.horizon();
    if (!(problem.g0() >= 0.0)) throw ValidationError("g0 must be >= 0");
    const double p = problem.p();

    const auto rhs = [&](double t, double g) {
        const double gpos = std::max(g, 0.0);  // stages may probe unphysical g < 0
        return problem.gamma(t) * g + problem.alpha(t) * std::pow(gpos, p) +
               problem.beta(t);
    };

    ScalarTrajectory out;
    if (cfg.dense_output) {
        DenseRecorder rec(out, 0.0, T, cfg.dense_samples, cfg.blowup_threshold);
        out.stats = detail::rk45_drive<double>(
            rhs, 0.0, problem.g0(), T, cfg,
            [&](double ta, double ya, double fa, double tb, double yb, double fb) {
                return rec.on_step(ta, ya, fa, tb, yb, fb);
            });
    } else {
        out.times.push_back(0.0);
        out.values.push_back(problem.g0());
        out.stats = detail::rk45_drive<double>(
            rhs, 0.0, problem.g0(), T, cfg,
            [&](double ta, double ya, double fa, double tb, double yb, double fb) {
                if (yb > cfg.blowup_threshold) {
                    BlowupEvent ev;
                    ev.threshold = cfg.blowup_threshold;
                    ev.bracket_lo = ta;
                    ev.bracket_hi = tb;
                    ev.time = locate_crossing(ta, ya, fa, tb, yb, fb, cfg.blowup_threshold);
                    out.times.push_back(ev.time);
                    out.values.push_back(std::max(yb, cfg.blowup_threshold));
                    out.blowup = ev;
                    return false;
                }
                out.times.push_back(tb);
                out.values.push_back(yb);
                return true;
            });
    }
    return out;
}

BernoulliValue exact_bernoulli(const Problem& problem, double t) {
    if (!beta_is_zero(problem))
        throw ProfileHasBetaError("exact_bernoulli requires beta == 0");
    if (!(problem.g0() > 0.0))
        throw ZeroInitialNormError("exact_bernoulli requires g0 > 0");
    const double p = problem.p();
    const double denom =
        std::pow(problem.g0(), 1.0 - p) - (p - 1.0) * problem.int_alpha_over_nu(t);
    if (!(denom > 0.0)) return {0.0, true};
    // log form: Gamma(t) - log(denom)/(p-1); robust when nu is extreme
    const double log_g =
        problem.cumulative_gamma(t) - std::log(denom) / (p - 1.0);
    return {std::exp(log_g), false};
}

std::optional<double> bernoulli_blowup_time(const Problem& problem) {
    if (!(problem.g0() > 0.0))
        throw ZeroInitialNormError("blow-up time requires g0 > 0");
    const double p = problem.p();
    const double target = std::pow(problem.g0(), 1.0 - p) / (p - 1.0);
    const auto& tab = problem.table();
    if (!(tab.int_alpha_over_nu(problem.horizon()) >= target)) return std::nullopt;

    // bisection on the monotone cumulative integral
    double lo = 0.0, hi = problem.horizon();
    const double tol = problem.spec().numerics.root_tol;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (tab.int_alpha_over_nu(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

OracleAgreement verify_oracle_agreement(const Problem& problem,
                                        const IntegratorConfig& cfg) {
    if (!beta_is_zero(problem))
        throw ProfileHasBetaError("verify_oracle_agreement requires beta == 0");

    IntegratorConfig dense = cfg;
    dense.dense_output = true;
    dense.dense_samples = 100;
    const ScalarTrajectory traj = integrate_comparison(problem, dense);

    OracleAgreement out;
    out.integrator_blowup = traj.blowup.has_value();
    const auto exact_t0 = bernoulli_blowup_time(problem);
    out.bernoulli_blowup = exact_t0.has_value();
    if (out.integrator_blowup && out.bernoulli_blowup)
        out.blowup_time_diff = std::abs(traj.blowup->time - *exact_t0);

    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        if (traj.blowup && traj.times[i] >= traj.blowup->bracket_lo) break;
        const BernoulliValue ex = exact_bernoulli(problem, traj.times[i]);
        if (ex.blown_up) break;
        const double rel = std::abs(traj.values[i] - ex.value) / (ex.value + 1e-30);
        out.max_rel_error = std::max(out.max_rel_error, rel);
    }
    return out;
}

}  // namespace stabcert
