#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stabcert/coefficients.hpp"

namespace stabcert {

/// Strict hypotheses are accepted only with a relative safety margin of 1e-6;
/// a positive margin below that yields `marginal`. `inconclusive` means a
/// tail or divergence diagnosis blocks the verdict either way.
enum class Verdict { holds, marginal, fails, inconclusive };

std::string to_string(Verdict v);

enum class TheoremId {
    lyapunov_21,
    global_bound_23,
    small_data_25,
    zeta_24,
    bounded_27a,
    decay_27b,
};

std::string to_string(TheoremId id);

/// A certified upper bound E(t) on the solution norm. The evaluator works in
/// log space so deep-decay envelopes stay comparable; it is self-contained
/// (captures its own table copy) and valid on [0, horizon].
struct Envelope {
    TheoremId provenance = TheoremId::global_bound_23;
    std::function<double(double)> log_value;
    double horizon = 0.0;
    std::vector<std::string> caveats;

    double operator()(double t) const { return std::exp(log_value(t)); }
    double log_at(double t) const { return log_value(t); }
};

// ---------------------------------------------------------------------------
// certificate types
// ---------------------------------------------------------------------------

struct LyapunovCertificate {
    Verdict verdict = Verdict::inconclusive;
    double eps = 0.0;
    double M = 0.0;
    double M_attained_at = 0.0;
    double int_alpha = 0.0;  // integral of alpha over [0, horizon]
    TailStatus alpha_tail = TailStatus::inconclusive;
    double M1 = 0.0;
    double delta_max = 0.0;    // largest admissible ||u(0)||
    double beta_budget = 0.0;  // bound on sup_t (int beta mu)/mu, = eps/3
    std::vector<std::string> caveats;
};

struct BudgetCheck {
    double sup_value = 0.0;  // sup over the grid of (int_0^t beta mu)/mu(t)
    bool holds = false;      // sup_value < eps/3
};

struct GlobalBoundCertificate {
    Verdict verdict = Verdict::inconclusive;
    double omega = 0.0;
    double I_inf = 0.0;  // integral of alpha/nu^{p-1} over [0, horizon]
    TailStatus alpha_tail = TailStatus::inconclusive;
    double M = 0.0;
    double eq11_lhs = 0.0;         // (g0 + omega)^{1-p}
    double eq11_margin_rel = 0.0;  // (lhs - (p-1) I_inf) / lhs
    double forcing_sup = 0.0;      // sup over grid of beta nu^p / alpha (0 if vacuous)
    bool forcing_ok = false;       // forcing_sup <= omega^p with the alpha=0 convention
    double M3 = 0.0;
    double C2 = 0.0;
    bool decay_flag = false;
    std::optional<Envelope> envelope;  // C2 * exp(Gamma(t))
    std::vector<std::string> caveats;
};

struct SmallDataCertificate {
    Verdict verdict = Verdict::inconclusive;
    double C = 0.0;
    double C1 = 0.0;
    double lhs = 0.0;  // (g0 + C^{1/p})^p
    double margin_rel = 0.0;
    std::optional<GlobalBoundCertificate> delegate;  // constants at omega = C^{1/p}
    std::vector<std::string> caveats;
};

struct ZetaCertificate {
    Verdict verdict = Verdict::inconclusive;
    double q = 0.0;
    std::vector<double> zeta_samples;  // at the grid nodes; may overflow to inf
    double margin = 0.0;               // min over grid of (q-1) beta/(q zeta)^p - alpha
    double worst_time = 0.0;
    bool bounded_flag = false;  // zeta shows bounded evidence within the horizon
    bool decay_flag = false;
    std::optional<Envelope> envelope;  // q * zeta(t)
    std::vector<std::string> caveats;
};

struct Bounded27Certificate {
    Verdict verdict = Verdict::inconclusive;  // holds means "bounded"
    double L = 0.0;
    double L_attained_at = 0.0;
    double int_beta = 0.0;
    TailStatus beta_tail = TailStatus::inconclusive;
    double bound = 0.0;  // g0 e^L + e^{2L} * int beta
    std::vector<std::string> caveats;
};

struct Decay27Certificate {
    Verdict verdict = Verdict::inconclusive;  // holds means "decays"
    double gamma_integral_at_horizon = 0.0;
    double ratio_at_horizon = 0.0;  // |beta/gamma| at the last usable node
    int skipped_gamma_zero = 0;
    std::vector<std::string> caveats;
};

struct BlowUpEstimate {
    std::optional<double> t0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double residual = 0.0;  // |g0^{1-p} - (p-1) IntAlphaOverNu(t0)|
    std::vector<std::string> caveats;
};

// ---------------------------------------------------------------------------
// checkers
// ---------------------------------------------------------------------------

/// Lyapunov stability under persistent perturbations: requires sup of Gamma
/// finite and alpha integrable. delta_max = (eps/3) e^{-M1} shrunk by 1e-6 so
/// the defining inequality holds strictly in floating point.
LyapunovCertificate check_lyapunov(const Problem& problem, double eps);

/// Evaluates sup over the grid of (int_0^t beta mu)/mu(t) against eps/3.
BudgetCheck perturbation_budget_check(const Problem& problem, double eps);

/// g0/mu(t) + (int_0^t beta mu)/mu(t): the bound valid while g stays <= eps.
double linear_bound(const Problem& problem, double eps, double t);

GlobalBoundCertificate check_global_bound(const Problem& problem, double omega);

struct OmegaSearch {
    std::optional<double> omega;
    std::optional<GlobalBoundCertificate> certificate;
};

/// Grid plus golden-section search over omega maximizing the joint margin;
/// returns the first omega whose certificate holds (or is marginal).
OmegaSearch search_omega(const Problem& problem);

SmallDataCertificate check_small_data(const Problem& problem, double C);

struct SmallDataSearch {
    std::optional<double> C;
    std::optional<SmallDataCertificate> certificate;
};

/// Deterministic log-grid search over C; tries omega^p from search_omega
/// first when available.
SmallDataSearch search_small_data(const Problem& problem);

/// zeta(t) = g0/nu(t) + (int_0^t beta nu)/nu(t), evaluated in log space.
double zeta(const Problem& problem, double t);
double log_zeta(const Problem& problem, double t);

ZetaCertificate check_zeta_certificate(const Problem& problem, double q);

struct QSearch {
    std::optional<double> q;
    std::optional<ZetaCertificate> certificate;
};

/// Log-grid sweep over q in (1, 1e3] maximizing the margin. The margin is not
/// monotone in q: (q-1)/q^p rises then falls, peaking at q = p/(p-1), which
/// is always included as a candidate.
QSearch search_q(const Problem& problem);

Bounded27Certificate check_bounded_27(const Problem& problem, const ZetaCertificate& zc);
Bounded27Certificate check_bounded_27(const Problem& problem);  // runs search_q itself

/// Horizon-truncated decay evidence: Gamma below -ln(1e6) and decreasing over
/// the tail window, |beta/gamma| below 1e-3 and decreasing. Throws
/// GammaVanishesError when gamma vanishes on more than 10% of the tail nodes.
Decay27Certificate check_decay_27(const Problem& problem, const ZetaCertificate& zc);
Decay27Certificate check_decay_27(const Problem& problem);

/// Root of g0^{1-p} = (p-1) IntAlphaOverNu(t0) on the monotone table.
/// Exact for the beta-free comparison equation; a caveat is attached when
/// beta is present.
BlowUpEstimate estimate_blowup_time(const Problem& problem);

}  // namespace stabcert
