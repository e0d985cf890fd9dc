#include "stabcert/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "stabcert/comparison.hpp"
#include "stabcert/errors.hpp"
#include "stabcert/quadrature.hpp"

namespace stabcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kStrictMargin = 1e-6;    // relative safety margin on strict inequalities
constexpr double kDecayGammaCut = -13.815510557964274;  // -ln(1e6)
constexpr double kDecayRatioCut = 1e-3;

double clamp_exp(double x) { return std::exp(std::min(x, 709.0)); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// indices of grid nodes inside the tail window [horizon/2, horizon]
std::vector<std::size_t> tail_window(std::span<const double> grid) {
    std::vector<std::size_t> idx;
    const double lo = 0.5 * grid.back();
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] >= lo) idx.push_back(i);
    return idx;
}

bool nonincreasing(const std::vector<double>& v, double abs_slack, double rel_slack) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1] + abs_slack + rel_slack * std::abs(v[i - 1])) return false;
    return true;
}

void note_tail(std::vector<std::string>& caveats, const char* what, TailStatus status) {
    switch (status) {
        case TailStatus::converged: break;
        case TailStatus::asserted:
            caveats.push_back(std::string(what) + " integrability user-asserted beyond horizon");
            break;
        case TailStatus::inconclusive:
            caveats.push_back(std::string(what) + " tail not converged within horizon");
            break;
        case TailStatus::diverging:
            caveats.push_back(std::string(what) + " tail grows under horizon doubling (divergence suspected)");
            break;
    }
}

void note_sup(std::vector<std::string>& caveats, const SupResult& sup) {
    if (sup.unbounded_evidence)
        caveats.push_back("cumulative gamma still climbing at the horizon (sup looks unbounded)");
    else if (sup.tail_caveat)
        caveats.push_back("sup of cumulative gamma is horizon-truncated (no tail assertion)");
}

bool tail_ok(TailStatus s) {
    return s == TailStatus::converged || s == TailStatus::asserted;
}

// sup over grid nodes of log(beta nu^p / alpha), with the alpha = 0 rule:
// a node with alpha = 0 and beta > 0 makes the bound unsatisfiable.
struct ForcingRatio {
    double log_sup = -kInf;
    double at = 0.0;
    bool infeasible = false;
};

ForcingRatio forcing_ratio_sup(const Problem& pb) {
    ForcingRatio out;
    const auto grid = pb.table().grid();
    const auto gammas = pb.table().gamma_nodes();
    const double p = pb.p();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = pb.alpha(grid[i]);
        const double b = pb.beta(grid[i]);
        if (a <= 0.0) {
            if (b > 0.0) {
                out.infeasible = true;
                out.at = grid[i];
                out.log_sup = kInf;
                return out;
            }
            continue;  // alpha = beta = 0: passes vacuously
        }
        if (b <= 0.0) continue;
        const double lr = std::log(b) - std::log(a) - p * gammas[i];
        if (lr > out.log_sup) {
            out.log_sup = lr;
            out.at = grid[i];
        }
    }
    return out;
}

// log of IntBetaMu(t) = integral of beta * mu over [0, t] at the grid nodes,
// accumulated in log space exactly like the table columns.
std::vector<double> log_int_beta_mu_nodes(const Problem& pb, double eps) {
    const auto& tab = pb.table();
    const auto grid = tab.grid();
    const double c = std::pow(eps, pb.p() - 1.0);
    const double quad_tol = pb.quad_tol();

    std::vector<double> log_b(grid.size(), -kInf);
    QuadratureOptions inner;
    inner.abs_tol = quad_tol;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double a = grid[i], b = grid[i + 1];
        const double gamma_a = tab.cumulative_gamma(a);
        const double alpha_a = tab.int_alpha(a);
        const double la = -(gamma_a + c * alpha_a);
        const double lb = -(tab.cumulative_gamma(b) + c * tab.int_alpha(b));
        const double m = std::max(la, lb);
        QuadratureOptions opts;
        opts.abs_tol = std::min(0.5 * quad_tol * (b - a) / grid.back() * clamp_exp(-m), 1e300);
        opts.rel_floor = 1e-13;
        const auto& prof = pb.spec().profile;
        const double s = integrate(
            [&](double xi) {
                const double g = gamma_a + integrate(prof.gamma, a, xi, inner);
                const double ia = alpha_a + integrate(prof.alpha, a, xi, inner);
                return prof.beta(xi) * clamp_exp(-(g + c * ia) - m);
            },
            a, b, opts);
        log_b[i + 1] = logaddexp(log_b[i], s > 0.0 ? m + std::log(s) : -kInf);
    }
    return log_b;
}

Envelope make_exponential_envelope(const Problem& pb, TheoremId id, double C2,
                                   std::vector<std::string> caveats) {
    Envelope env;
    env.provenance = id;
    env.horizon = pb.horizon();
    env.caveats = std::move(caveats);
    const double log_c2 = C2 > 0.0 ? std::log(C2) : -kInf;
    env.log_value = [tab = pb.table(), log_c2](double t) {
        return log_c2 + tab.cumulative_gamma(t);
    };
    return env;
}

Envelope make_zeta_envelope(const Problem& pb, double q, std::vector<std::string> caveats) {
    Envelope env;
    env.provenance = TheoremId::zeta_24;
    env.horizon = pb.horizon();
    env.caveats = std::move(caveats);
    const double log_q = std::log(q);
    const double log_g0 = pb.g0() > 0.0 ? std::log(pb.g0()) : -kInf;
    env.log_value = [tab = pb.table(), log_q, log_g0](double t) {
        return log_q + tab.cumulative_gamma(t) +
               logaddexp(log_g0, tab.log_int_beta_nu(t));
    };
    return env;
}

struct DecayEvidence {
    bool gamma_ok = false;
    bool ratio_ok = false;
    double gamma_at_horizon = 0.0;
    double ratio_last = 0.0;
    int skipped = 0;
};

DecayEvidence decay_evidence(const Problem& pb) {
    const auto& tab = pb.table();
    const auto grid = tab.grid();
    const auto gammas = tab.gamma_nodes();
    const auto window = tail_window(grid);

    DecayEvidence ev;
    ev.gamma_at_horizon = gammas.back();
    std::vector<double> gw;
    gw.reserve(window.size());
    for (const std::size_t i : window) gw.push_back(gammas[i]);
    ev.gamma_ok = ev.gamma_at_horizon < kDecayGammaCut && nonincreasing(gw, 1e-9, 0.0);
    if (!ev.gamma_ok) return ev;  // ratio test not reached

    std::vector<double> ratios;
    ratios.reserve(window.size());
    for (const std::size_t i : window) {
        const double g = pb.gamma(grid[i]);
        if (g == 0.0) {
            ++ev.skipped;
            continue;
        }
        ratios.push_back(std::abs(pb.beta(grid[i]) / g));
    }
    if (10 * static_cast<std::size_t>(ev.skipped) > window.size())
        throw GammaVanishesError(
            "gamma vanishes on " + std::to_string(ev.skipped) + " of " +
            std::to_string(window.size()) +
            " tail-window nodes; the beta/gamma ratio test is inapplicable");
    if (!ratios.empty()) {
        ev.ratio_last = ratios.back();
        ev.ratio_ok = ev.ratio_last < kDecayRatioCut && nonincreasing(ratios, 1e-12, 1e-6);
    }
    return ev;
}

bool gamma_decay_flag(const Problem& pb) {
    const auto gammas = pb.table().gamma_nodes();
    const auto window = tail_window(pb.table().grid());
    std::vector<double> gw;
    gw.reserve(window.size());
    for (const std::size_t i : window) gw.push_back(gammas[i]);
    return gammas.back() < kDecayGammaCut && nonincreasing(gw, 1e-9, 0.0);
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::marginal: return "marginal";
        case Verdict::fails: return "fails";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

std::string to_string(TheoremId id) {
    switch (id) {
        case TheoremId::lyapunov_21: return "lyapunov_2.1";
        case TheoremId::global_bound_23: return "global_bound_2.3";
        case TheoremId::small_data_25: return "small_data_2.5";
        case TheoremId::zeta_24: return "zeta_2.4";
        case TheoremId::bounded_27a: return "bounded_2.7a";
        case TheoremId::decay_27b: return "decay_2.7b";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Theorem 2.1
// ---------------------------------------------------------------------------

LyapunovCertificate check_lyapunov(const Problem& problem, double eps) {
    if (!(eps > 0.0)) throw ValidationError("eps must be > 0");
    LyapunovCertificate cert;
    cert.eps = eps;

    const SupResult sup = problem.sup_cumulative_gamma();
    cert.M = sup.value;
    cert.M_attained_at = sup.attained_at;
    note_sup(cert.caveats, sup);

    const ImproperIntegral ia = problem.improper_integral_alpha();
    cert.int_alpha = ia.value;
    cert.alpha_tail = ia.status;
    note_tail(cert.caveats, "alpha", ia.status);

    cert.M1 = cert.M + std::pow(eps, problem.p() - 1.0) * cert.int_alpha;
    cert.delta_max = (eps / 3.0) * std::exp(-cert.M1) * (1.0 - 1e-6);
    cert.beta_budget = eps / 3.0;

    if (sup.unbounded_evidence) {
        cert.verdict = Verdict::fails;
    } else if (ia.status == TailStatus::diverging) {
        cert.verdict = Verdict::inconclusive;
    } else if (!tail_ok(ia.status)) {
        cert.verdict = Verdict::inconclusive;
    } else {
        cert.verdict = Verdict::holds;
    }
    return cert;
}

BudgetCheck perturbation_budget_check(const Problem& problem, double eps) {
    if (!(eps > 0.0)) throw ValidationError("eps must be > 0");
    const auto& tab = problem.table();
    const auto grid = tab.grid();
    const double c = std::pow(eps, problem.p() - 1.0);
    const std::vector<double> log_b = log_int_beta_mu_nodes(problem, eps);

    BudgetCheck out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double log_inv_mu = tab.cumulative_gamma(grid[i]) + c * tab.int_alpha(grid[i]);
        const double ratio = std::exp(log_b[i] + log_inv_mu);
        out.sup_value = std::max(out.sup_value, ratio);
    }
    out.holds = out.sup_value < eps / 3.0;
    return out;
}

double linear_bound(const Problem& problem, double eps, double t) {
    if (!(eps > 0.0)) throw ValidationError("eps must be > 0");
    const auto& tab = problem.table();
    const auto grid = tab.grid();
    const double c = std::pow(eps, problem.p() - 1.0);
    const std::vector<double> log_b_nodes = log_int_beta_mu_nodes(problem, eps);

    // node below t, then the short remainder
    std::size_t i = 0;
    while (i + 1 < grid.size() && grid[i + 1] <= t) ++i;
    double log_b = log_b_nodes[i];
    if (t > grid[i]) {
        const auto& prof = problem.spec().profile;
        QuadratureOptions inner;
        inner.abs_tol = problem.quad_tol();
        const double gamma_a = tab.cumulative_gamma(grid[i]);
        const double alpha_a = tab.int_alpha(grid[i]);
        const double la = -(gamma_a + c * alpha_a);
        const double lt = -(tab.cumulative_gamma(t) + c * tab.int_alpha(t));
        const double m = std::max(la, lt);
        QuadratureOptions opts;
        opts.abs_tol = std::min(0.5 * problem.quad_tol() * clamp_exp(-m), 1e300);
        opts.rel_floor = 1e-13;
        const double s = integrate(
            [&](double xi) {
                const double g = gamma_a + integrate(prof.gamma, grid[i], xi, inner);
                const double ia = alpha_a + integrate(prof.alpha, grid[i], xi, inner);
                return prof.beta(xi) * clamp_exp(-(g + c * ia) - m);
            },
            grid[i], t, opts);
        log_b = logaddexp(log_b, s > 0.0 ? m + std::log(s) : -kInf);
    }
    const double log_g0 = problem.g0() > 0.0 ? std::log(problem.g0()) : -kInf;
    const double log_inv_mu = tab.cumulative_gamma(t) + c * tab.int_alpha(t);
    return std::exp(logaddexp(log_g0, log_b) + log_inv_mu);
}

// ---------------------------------------------------------------------------
// Theorem 2.3 / Corollary 2.5
// ---------------------------------------------------------------------------

GlobalBoundCertificate check_global_bound(const Problem& problem, double omega) {
    if (!(omega > 0.0)) throw ValidationError("omega must be > 0");
    GlobalBoundCertificate cert;
    cert.omega = omega;
    const double p = problem.p();

    const SupResult sup = problem.sup_cumulative_gamma();
    cert.M = sup.value;
    note_sup(cert.caveats, sup);

    const ImproperIntegral ii = problem.improper_integral_alpha_over_nu();
    cert.I_inf = ii.value;
    cert.alpha_tail = ii.status;
    note_tail(cert.caveats, "alpha/nu^{p-1}", ii.status);

    cert.eq11_lhs = std::pow(problem.g0() + omega, 1.0 - p);
    const double rhs = (p - 1.0) * cert.I_inf;
    cert.eq11_margin_rel = (cert.eq11_lhs - rhs) / cert.eq11_lhs;

    const ForcingRatio fr = forcing_ratio_sup(problem);
    cert.forcing_sup = fr.infeasible ? kInf : std::exp(fr.log_sup);
    cert.forcing_ok =
        !fr.infeasible && (fr.log_sup <= p * std::log(omega) + 1e-12);
    if (fr.infeasible)
        cert.caveats.push_back("beta > 0 where alpha = 0 (at t=" + fmt(fr.at) +
                               "); forcing bound unsatisfiable");

    if (sup.unbounded_evidence || !cert.forcing_ok || !(cert.eq11_margin_rel > 0.0)) {
        cert.verdict = Verdict::fails;
        if (!(cert.eq11_margin_rel > 0.0))
            cert.caveats.push_back("nonpositive denominator: (g0+omega)^{1-p} <= (p-1) I");
        return cert;
    }

    cert.M3 = 1.0 / (cert.eq11_lhs - rhs);
    cert.C2 = std::pow(cert.M3, 1.0 / (p - 1.0)) - omega;
    cert.decay_flag = gamma_decay_flag(problem);

    std::vector<std::string> env_caveats = cert.caveats;
    cert.envelope =
        make_exponential_envelope(problem, TheoremId::global_bound_23, cert.C2, env_caveats);

    if (!tail_ok(ii.status)) {
        cert.verdict = Verdict::inconclusive;
    } else if (cert.eq11_margin_rel < kStrictMargin) {
        cert.verdict = Verdict::marginal;
    } else {
        cert.verdict = Verdict::holds;
    }
    return cert;
}

OmegaSearch search_omega(const Problem& problem) {
    OmegaSearch out;
    const double p = problem.p();
    if (problem.sup_cumulative_gamma().unbounded_evidence) return out;  // eq10 dead
    const ImproperIntegral ii = problem.improper_integral_alpha_over_nu();
    const double rhs = (p - 1.0) * ii.value;

    // eq11 feasibility caps omega: g0 + omega < rhs^{-1/(p-1)}
    double omega_hi = 1e6;
    if (rhs > 0.0) {
        const double cap = std::pow(rhs, -1.0 / (p - 1.0)) - problem.g0();
        if (!(cap > 1e-6)) return out;  // no admissible omega at all
        omega_hi = std::min(omega_hi, cap * (1.0 - 1e-9));
    }
    const ForcingRatio fr = forcing_ratio_sup(problem);
    if (fr.infeasible) return out;

    const auto margin = [&](double w) {
        const double m1 = std::pow(problem.g0() + w, 1.0 - p) - rhs;
        const double m2 =
            fr.log_sup == -kInf ? kInf : std::pow(w, p) - std::exp(fr.log_sup);
        return std::min(m1, m2);
    };

    // ascending log grid; return the first omega whose certificate holds
    constexpr int kGridN = 64;
    const double lo = 1e-6;
    std::vector<double> grid;
    grid.reserve(kGridN);
    for (int i = 0; i < kGridN; ++i)
        grid.push_back(lo * std::pow(omega_hi / lo, static_cast<double>(i) / (kGridN - 1)));

    for (const double w : grid) {
        if (!(margin(w) > 0.0)) continue;
        GlobalBoundCertificate cert = check_global_bound(problem, w);
        if (cert.verdict == Verdict::holds || cert.verdict == Verdict::marginal ||
            cert.verdict == Verdict::inconclusive) {
            out.omega = w;
            out.certificate = std::move(cert);
            return out;
        }
    }

    // no grid point was feasible: refine around the margin maximizer
    double best_w = grid.front();
    double best_m = margin(best_w);
    for (const double w : grid) {
        const double m = margin(w);
        if (m > best_m) {
            best_m = m;
            best_w = w;
        }
    }
    const double refined = detail::golden_max(margin, std::max(lo, best_w / 4.0),
                                              std::min(omega_hi, best_w * 4.0));
    if (margin(refined) > 0.0) {
        GlobalBoundCertificate cert = check_global_bound(problem, refined);
        if (cert.verdict != Verdict::fails) {
            out.omega = refined;
            out.certificate = std::move(cert);
        }
    }
    return out;
}

SmallDataCertificate check_small_data(const Problem& problem, double C) {
    if (!(C > 0.0)) throw ValidationError("C must be > 0");
    SmallDataCertificate cert;
    cert.C = C;
    const double p = problem.p();

    const SupResult sup = problem.sup_cumulative_gamma();
    note_sup(cert.caveats, sup);

    const ImproperIntegral ii = problem.improper_integral_alpha_over_nu();
    note_tail(cert.caveats, "alpha/nu^{p-1}", ii.status);
    const double denom = (p - 1.0) * ii.value;
    cert.C1 = denom > 0.0 ? std::pow(1.0 / denom, p / (p - 1.0)) : kInf;
    if (std::isinf(ii.value)) cert.C1 = 0.0;

    const ForcingRatio fr = forcing_ratio_sup(problem);
    const bool forcing_ok = !fr.infeasible && fr.log_sup <= std::log(C) + 1e-12;
    if (fr.infeasible)
        cert.caveats.push_back("beta > 0 where alpha = 0; forcing bound unsatisfiable");

    cert.lhs = std::pow(problem.g0() + std::pow(C, 1.0 / p), p);
    cert.margin_rel = std::isinf(cert.C1) ? 1.0 : (cert.C1 - cert.lhs) / cert.C1;

    if (sup.unbounded_evidence || !forcing_ok || !(cert.margin_rel > 0.0)) {
        cert.verdict = Verdict::fails;
        return cert;
    }

    cert.delegate = check_global_bound(problem, std::pow(C, 1.0 / p));
    if (!tail_ok(ii.status)) {
        cert.verdict = Verdict::inconclusive;
    } else if (cert.margin_rel < kStrictMargin) {
        cert.verdict = Verdict::marginal;
    } else {
        cert.verdict = Verdict::holds;
    }
    return cert;
}

SmallDataSearch search_small_data(const Problem& problem) {
    SmallDataSearch out;
    std::vector<double> candidates;
    const OmegaSearch om = search_omega(problem);
    if (om.omega) candidates.push_back(std::pow(*om.omega, problem.p()));
    for (int k = -9; k <= 6; ++k) candidates.push_back(std::pow(10.0, k));

    for (const double c : candidates) {
        SmallDataCertificate cert = check_small_data(problem, c);
        if (cert.verdict == Verdict::holds || cert.verdict == Verdict::marginal ||
            cert.verdict == Verdict::inconclusive) {
            out.C = c;
            out.certificate = std::move(cert);
            return out;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Theorem 2.4 / Theorem 2.7
// ---------------------------------------------------------------------------

double log_zeta(const Problem& problem, double t) {
    const double log_g0 = problem.g0() > 0.0 ? std::log(problem.g0()) : -kInf;
    if (t == 0.0) return log_g0;
    return problem.cumulative_gamma(t) +
           logaddexp(log_g0, problem.log_int_beta_nu(t));
}

double zeta(const Problem& problem, double t) {
    if (t == 0.0) return problem.g0();  // nu(0) = 1 and an empty integral
    return std::exp(log_zeta(problem, t));
}

ZetaCertificate check_zeta_certificate(const Problem& problem, double q) {
    if (!(q > 1.0)) throw ValidationError("q must be > 1");
    if (!(problem.g0() > 0.0))
        throw ZeroInitialNormError("Theorem 2.4 requires g(0) != 0");

    ZetaCertificate cert;
    cert.q = q;
    const double p = problem.p();
    const auto& tab = problem.table();
    const auto grid = tab.grid();
    const auto gammas = tab.gamma_nodes();
    const double log_g0 = std::log(problem.g0());
    const double log_q = std::log(q);

    std::vector<double> log_zetas(grid.size());
    cert.zeta_samples.resize(grid.size());
    cert.margin = kInf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double lz =
            i == 0 ? log_g0
                   : gammas[i] + logaddexp(log_g0, tab.log_int_beta_nu(grid[i]));
        log_zetas[i] = lz;
        cert.zeta_samples[i] = std::exp(lz);
        const double bound_term =
            (q - 1.0) * problem.beta(grid[i]) * std::exp(-p * (log_q + lz));
        const double m = bound_term - problem.alpha(grid[i]);
        if (m < cert.margin) {
            cert.margin = m;
            cert.worst_time = grid[i];
        }
    }
    cert.verdict = cert.margin >= -1e-12 ? Verdict::holds : Verdict::fails;

    // bounded evidence: zeta's grid max not still climbing at the horizon
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < log_zetas.size(); ++i)
        if (log_zetas[i] > log_zetas[argmax]) argmax = i;
    const auto window = tail_window(grid);
    bool climbing = false;
    if (argmax + 1 >= log_zetas.size() - 1 && !window.empty()) {
        const double rise = log_zetas.back() - log_zetas[window.front()];
        climbing = rise > 1e-6;
    }
    cert.bounded_flag = !climbing;
    cert.caveats.push_back("zeta boundedness is horizon evidence only");

    try {
        const DecayEvidence ev = decay_evidence(problem);
        cert.decay_flag = ev.gamma_ok && ev.ratio_ok;
    } catch (const GammaVanishesError&) {
        cert.decay_flag = false;
        cert.caveats.push_back("beta/gamma ratio test inapplicable (gamma vanishes on the tail)");
    }

    if (cert.verdict == Verdict::holds)
        cert.envelope = make_zeta_envelope(problem, q, cert.caveats);
    return cert;
}

QSearch search_q(const Problem& problem) {
    QSearch out;
    if (!(problem.g0() > 0.0))
        throw ZeroInitialNormError("Theorem 2.4 requires g(0) != 0");
    const double p = problem.p();
    const auto& tab = problem.table();
    const auto grid = tab.grid();
    const auto gammas = tab.gamma_nodes();
    const double log_g0 = std::log(problem.g0());

    std::vector<double> log_zetas(grid.size()), alphas(grid.size()), betas(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        log_zetas[i] = i == 0 ? log_g0
                              : gammas[i] + logaddexp(log_g0, tab.log_int_beta_nu(grid[i]));
        alphas[i] = problem.alpha(grid[i]);
        betas[i] = problem.beta(grid[i]);
    }
    const auto margin = [&](double q) {
        const double log_q = std::log(q);
        double m = kInf;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double term =
                (q - 1.0) * betas[i] * std::exp(-p * (log_q + log_zetas[i]));
            m = std::min(m, term - alphas[i]);
        }
        return m;
    };

    // the analytic maximizer of (q-1)/q^p leads the candidate list
    std::vector<double> candidates{p / (p - 1.0)};
    for (int i = 0; i < 96; ++i)
        candidates.push_back(1.0 + std::pow(10.0, -6.0 + 9.0 * i / 95.0));

    double best_q = candidates.front();
    double best_m = margin(best_q);
    for (const double q : candidates) {
        if (!(q > 1.0) || q > 1e3) continue;
        const double m = margin(q);
        if (m > best_m) {
            best_m = m;
            best_q = q;
        }
    }
    const double refined = detail::golden_max(
        margin, std::max(1.0 + 1e-9, 0.5 * (1.0 + best_q)), std::min(1e3, 2.0 * best_q));
    if (margin(refined) > best_m) best_q = refined;

    if (margin(best_q) >= -1e-12) {
        out.q = best_q;
        out.certificate = check_zeta_certificate(problem, best_q);
    }
    return out;
}

Bounded27Certificate check_bounded_27(const Problem& problem, const ZetaCertificate& zc) {
    Bounded27Certificate cert;
    const bool pre_ok = zc.verdict == Verdict::holds;
    if (!pre_ok)
        cert.caveats.push_back("Theorem 2.4 hypothesis not established for this profile");

    const SupResult sup = problem.sup_abs_cumulative_gamma();
    cert.L = sup.value;
    cert.L_attained_at = sup.attained_at;
    if (sup.unbounded_evidence)
        cert.caveats.push_back("|cumulative gamma| still climbing at the horizon");
    else if (sup.tail_caveat)
        cert.caveats.push_back("L is horizon-truncated (no tail assertion)");

    const ImproperIntegral ib = problem.improper_integral_beta();
    cert.int_beta = ib.value;
    cert.beta_tail = ib.status;
    note_tail(cert.caveats, "beta", ib.status);

    cert.bound = problem.g0() * std::exp(cert.L) + std::exp(2.0 * cert.L) * cert.int_beta;

    if (!pre_ok || sup.unbounded_evidence || ib.status == TailStatus::inconclusive) {
        cert.verdict = Verdict::inconclusive;
    } else if (ib.status == TailStatus::diverging) {
        cert.verdict = Verdict::fails;
    } else {
        cert.verdict = Verdict::holds;
    }
    return cert;
}

Bounded27Certificate check_bounded_27(const Problem& problem) {
    const QSearch qs = search_q(problem);
    if (qs.certificate) return check_bounded_27(problem, *qs.certificate);
    ZetaCertificate missing;
    missing.verdict = Verdict::fails;
    return check_bounded_27(problem, missing);
}

Decay27Certificate check_decay_27(const Problem& problem, const ZetaCertificate& zc) {
    Decay27Certificate cert;
    cert.caveats.push_back("limits are horizon-truncated evidence, not a proof");
    const bool pre_ok = zc.verdict == Verdict::holds;
    if (!pre_ok) {
        cert.caveats.push_back("Theorem 2.4 hypothesis not established for this profile");
        cert.verdict = Verdict::inconclusive;
        return cert;
    }
    const DecayEvidence ev = decay_evidence(problem);
    cert.gamma_integral_at_horizon = ev.gamma_at_horizon;
    cert.ratio_at_horizon = ev.ratio_last;
    cert.skipped_gamma_zero = ev.skipped;
    if (ev.skipped > 0)
        cert.caveats.push_back("skipped " + std::to_string(ev.skipped) +
                               " tail nodes with gamma = 0 in the ratio test");
    cert.verdict = ev.gamma_ok && ev.ratio_ok ? Verdict::holds : Verdict::fails;
    return cert;
}

Decay27Certificate check_decay_27(const Problem& problem) {
    const QSearch qs = search_q(problem);
    if (qs.certificate) return check_decay_27(problem, *qs.certificate);
    ZetaCertificate missing;
    missing.verdict = Verdict::fails;
    return check_decay_27(problem, missing);
}

// ---------------------------------------------------------------------------
// blow-up
// ---------------------------------------------------------------------------

BlowUpEstimate estimate_blowup_time(const Problem& problem) {
    if (!(problem.g0() > 0.0))
        throw ZeroInitialNormError("blow-up estimate requires g0 > 0");
    BlowUpEstimate est;
    if (problem.int_beta(problem.horizon()) > 0.0)
        est.caveats.push_back(
            "beta is not zero: the estimate refers to the beta-free comparison equation");

    const double p = problem.p();
    const double root_tol = problem.spec().numerics.root_tol;
    const auto t0 = bernoulli_blowup_time(problem);
    if (!t0) {
        est.caveats.push_back("(p-1) IntAlphaOverNu stays below g0^{1-p}: no blow-up within horizon");
        return est;
    }
    est.t0 = *t0;
    est.bracket_lo = std::max(0.0, *t0 - root_tol);
    est.bracket_hi = std::min(problem.horizon(), *t0 + root_tol);
    est.residual = std::abs(std::pow(problem.g0(), 1.0 - p) -
                            (p - 1.0) * problem.int_alpha_over_nu(*t0));
    return est;
}

}  // namespace stabcert
