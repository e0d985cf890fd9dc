#include "stabcert/systems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "stabcert/errors.hpp"
#include "stabcert/rk45.hpp"

namespace stabcert {

namespace detail {

template <>
struct StateOps<Eigen::VectorXd> {
    static double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y0,
                             const Eigen::VectorXd& y1, double atol, double rtol) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < err.size(); ++i) {
            if (err[i] == 0.0) continue;
            const double scale =
                atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
            const double e = err[i] / scale;
            acc += e * e;
        }
        return std::sqrt(acc / static_cast<double>(err.size()));
    }
    static double magnitude(const Eigen::VectorXd& y) { return y.norm(); }
    static bool admissible(const Eigen::VectorXd&) { return true; }
    static Eigen::VectorXd project(const Eigen::VectorXd& y) { return y; }
};

}  // namespace detail

TestSystem build_sharp_system(const ProblemSpec& spec, int n, std::uint64_t seed,
                              const SystemToggles& toggles) {
    if (n < 2) throw DimensionError("test systems need dimension n >= 2");
    if (toggles.worst_case && spec.profile.p < 2.0)
        throw ValidationError("worst_case mode requires p >= 2 (the radial map "
                              "||u||^{p-1} u is not smooth enough at 0 otherwise)");

    TestSystem sys;
    sys.n_ = n;
    sys.seed_ = seed;
    sys.toggles_ = toggles;
    sys.p_ = spec.profile.p;
    sys.gamma_ = spec.profile.gamma;
    sys.alpha_ = spec.profile.alpha;
    sys.beta_ = spec.profile.beta;
    sys.profile_hash_ = source_hash(spec.profile.gamma.source() + "|" +
                                    spec.profile.alpha.source() + "|" +
                                    spec.profile.beta.source() + "|p=" +
                                    std::to_string(spec.profile.p));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = gauss(rng);

    sys.S0_ = 0.5 * (m - m.transpose());
    const double fn = sys.S0_.norm();
    if (fn > 0.0) sys.S0_ /= fn;  // unit Frobenius norm

    if (toggles.worst_case) {
        sys.Q_ = Eigen::MatrixXd::Identity(n, n);
    } else {
        Eigen::MatrixXd g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = gauss(rng);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ();
        const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int j = 0; j < n; ++j)
            if (r(j, j) < 0.0) q.col(j) *= -1.0;  // fix the sign convention
        sys.Q_ = q;
    }

    sys.e_ = Eigen::VectorXd::Zero(n);
    sys.e_[0] = 1.0;
    sys.u0_ = spec.g0 * sys.e_;
    return sys;
}

Eigen::MatrixXd TestSystem::a_matrix(double t) const {
    return gamma_(t) * Eigen::MatrixXd::Identity(n_, n_) + std::cos(t) * S0_;
}

Eigen::VectorXd TestSystem::nonlinearity(double t, const Eigen::VectorXd& u) const {
    const double r = u.norm();
    if (r == 0.0) return Eigen::VectorXd::Zero(n_);
    const double scale = alpha_(t) * std::pow(r, p_ - 1.0);
    if (toggles_.worst_case) return scale * u;
    return scale * (Q_ * u);
}

Eigen::VectorXd TestSystem::forcing(double t, const Eigen::VectorXd& u) const {
    const double b = beta_(t);
    if (toggles_.adversarial_forcing) {
        const double r = u.norm();
        if (r > 0.0) return (b / r) * u;
    }
    return b * e_;
}

Eigen::VectorXd TestSystem::rhs(double t, const Eigen::VectorXd& u) const {
    return Eigen::VectorXd(gamma_(t) * u + std::cos(t) * (S0_ * u) + nonlinearity(t, u) +
                           forcing(t, u));
}

VectorTrajectory integrate_system(const TestSystem& system, const IntegratorConfig& cfg,
                                  double t_end) {
    VectorTrajectory out;
    const auto rhs = [&](double t, const Eigen::VectorXd& u) { return system.rhs(t, u); };

    const auto record = [&](double t, const Eigen::VectorXd& u) {
        out.times.push_back(t);
        out.states.push_back(u);
        out.norms.push_back(u.norm());
    };

    if (cfg.dense_output) {
        const int samples = std::max(cfg.dense_samples, 2);
        int next = 0;
        out.stats = detail::rk45_drive<Eigen::VectorXd>(
            rhs, 0.0, system.initial_state(), t_end, cfg,
            [&](double ta, const Eigen::VectorXd& ya, const Eigen::VectorXd& fa, double tb,
                const Eigen::VectorXd& yb, const Eigen::VectorXd& fb) {
                while (next < samples) {
                    const double ts = t_end * next / (samples - 1);
                    if (ts > tb + 1e-15 * std::max(1.0, std::abs(tb))) break;
                    record(ts, ts <= ta ? ya
                                        : detail::hermite(ta, ya, fa, tb, yb, fb,
                                                          std::min(ts, tb)));
                    ++next;
                }
                if (yb.norm() > cfg.blowup_threshold) {
                    BlowupEvent ev;
                    ev.threshold = cfg.blowup_threshold;
                    ev.bracket_lo = ta;
                    ev.bracket_hi = tb;
                    double hi = tb;
                    if (yb.allFinite() && fb.allFinite()) {
                        double lo = ta;
                        for (int i = 0; i < 80 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
                            const double mid = 0.5 * (lo + hi);
                            (detail::hermite(ta, ya, fa, tb, yb, fb, mid).norm() >
                                     cfg.blowup_threshold
                                 ? hi
                                 : lo) = mid;
                        }
                    }
                    ev.time = hi;
                    record(ev.time, yb);
                    out.blowup = ev;
                    return false;
                }
                return true;
            });
    } else {
        record(0.0, system.initial_state());
        out.stats = detail::rk45_drive<Eigen::VectorXd>(
            rhs, 0.0, system.initial_state(), t_end, cfg,
            [&](double ta, const Eigen::VectorXd&, const Eigen::VectorXd&, double tb,
                const Eigen::VectorXd& yb, const Eigen::VectorXd&) {
                record(tb, yb);
                if (yb.norm() > cfg.blowup_threshold) {
                    BlowupEvent ev;
                    ev.threshold = cfg.blowup_threshold;
                    ev.bracket_lo = ta;
                    ev.bracket_hi = tb;
                    ev.time = tb;
                    out.blowup = ev;
                    return false;
                }
                return true;
            });
    }
    return out;
}

namespace {

EnvelopeCheck check_norms(const std::vector<double>& times, const std::vector<double>& norms,
                          const Envelope& envelope) {
    const double slack = 1e-9 * (1.0 + envelope.horizon);
    if (!times.empty() && times.back() > envelope.horizon + slack)
        throw ValidationError("trajectory extends past the envelope horizon");

    EnvelopeCheck out;
    double max_env = 0.0;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double e = envelope(times[i]);
        max_env = std::max(max_env, e);
        const double margin = e - norms[i];
        if (margin < worst) {
            worst = margin;
            out.worst_time = times[i];
        }
    }
    out.worst_margin = worst;
    out.holds = !times.empty() && worst > -1e-6 * max_env;
    return out;
}

}  // namespace

EnvelopeCheck check_envelope(const VectorTrajectory& trajectory, const Envelope& envelope) {
    return check_norms(trajectory.times, trajectory.norms, envelope);
}

EnvelopeCheck check_envelope(const ScalarTrajectory& trajectory, const Envelope& envelope) {
    return check_norms(trajectory.times, trajectory.values, envelope);
}

}  // namespace stabcert
