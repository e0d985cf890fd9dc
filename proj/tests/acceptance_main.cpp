// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in place.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "stabcert/certificates.hpp"
#include "stabcert/comparison.hpp"
#include "stabcert/errors.hpp"
#include "stabcert/systems.hpp"

namespace fs = std::filesystem;
using namespace stabcert;
using testutil::make_spec;

namespace {

int failures = 0;

void criterion(int n, const char* desc, bool ok, const std::string& note = "") {
    std::printf("%s  criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", n, desc,
                note.empty() ? "" : " -- ", note.c_str());
    if (!ok) ++failures;
}

IntegratorConfig tight_config() {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-9;
    cfg.abs_tol = 1e-14;
    return cfg;
}

// 1. Bernoulli oracle equivalence on 20 seeded beta-free profiles.
void criterion_1() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double p_choices[3] = {1.5, 2.0, 3.0};

    double worst = 0.0;
    int blowups = 0, checked = 0;
    bool ok = true;
    std::string note;
    for (int i = 0; i < 20 && ok; ++i) {
        std::string gamma;
        switch (i % 3) {
            case 0: gamma = "const(" + std::to_string(-1.0 + 1.3 * unif(rng)) + ")"; break;
            case 1: gamma = "sin"; break;
            default:
                gamma = "sin_damped(" + std::to_string(0.3 + 0.6 * unif(rng)) + ")";
        }
        std::string alpha;
        if (i % 2 == 0) {
            alpha = std::to_string(0.05 + 0.25 * unif(rng)) + "*exp(-" +
                    std::to_string(0.5 + 2.5 * unif(rng)) + "*t)";
        } else {
            alpha = std::to_string(0.05 + 0.25 * unif(rng)) + "*pow(1+t,-" +
                    std::to_string(1.5 + 1.5 * unif(rng)) + ")";
        }
        const double p = p_choices[i % 3];
        const double g0 = 0.05 + 0.45 * unif(rng);

        const Problem pb(make_spec(gamma, alpha, "const(0)", p, g0, 20.0,
                                   TailAssertion::none, 512));
        const OracleAgreement res = verify_oracle_agreement(pb, tight_config());
        if (res.integrator_blowup || res.bernoulli_blowup) {
            ++blowups;
            if (res.integrator_blowup != res.bernoulli_blowup) {
                ok = false;
                note = "blow-up mismatch on profile " + std::to_string(i);
            }
            continue;
        }
        ++checked;
        worst = std::max(worst, res.max_rel_error);
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok) ok = worst < 1e-6 && secs < 10.0 && checked >= 10;
    if (note.empty()) {
        std::ostringstream os;
        os << "max rel err " << worst << " over " << checked << " profiles (" << blowups
           << " blow-ups), " << secs << " s";
        note = os.str();
    }
    criterion(1, "Bernoulli oracle equivalence (< 1e-6, < 10 s)", ok, note);
}

// 2. Blow-up agreement at closed-form times 1, 2, 10.
void criterion_2() {
    const double g0s[3] = {1.0, 0.5, 0.1};
    const double t0s[3] = {1.0, 2.0, 10.0};
    bool ok = true;
    std::string note;
    for (int i = 0; i < 3; ++i) {
        const Problem pb(make_spec("const(0)", "const(1)", "const(0)", 2.0, g0s[i], 20.0,
                                   TailAssertion::none, 512));
        const BlowUpEstimate est = estimate_blowup_time(pb);
        IntegratorConfig cfg;
        const ScalarTrajectory traj = integrate_comparison(pb, cfg);
        const bool here = est.t0 && traj.blowup &&
                          std::abs(*est.t0 - t0s[i]) <= 1e-3 &&
                          std::abs(traj.blowup->time - *est.t0) <= 1e-2;
        if (!here) {
            ok = false;
            note = "g0 = " + std::to_string(g0s[i]);
        }
    }
    criterion(2, "blow-up times {1, 2, 10} within 1e-3; oracle agreement within 1e-2", ok,
              note);
}

// 3. Theorem 2.3 envelope soundness on the worked profile.
void criterion_3() {
    const ProblemSpec spec =
        make_spec("const(-1)", "exp_decay(2)", "const(0)", 2.0, 1.0, 30.0);
    const Problem pb(spec);
    const GlobalBoundCertificate cert = check_global_bound(pb, 1.0);
    bool ok = cert.verdict == Verdict::holds &&
              std::abs(cert.M3 - 6.0) / 6.0 < 1e-6 &&
              std::abs(cert.C2 - 5.0) / 5.0 < 1e-6;

    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-300;
    const ScalarTrajectory g = integrate_comparison(pb, cfg);
    for (std::size_t i = 0; ok && i < g.times.size(); ++i)
        ok = g.values[i] <= 5.0 * std::exp(-g.times[i]) * (1.0 + 1e-6);

    const TestSystem sys = build_sharp_system(spec, 4, 0);
    const VectorTrajectory u = integrate_system(sys, cfg, 30.0);
    for (std::size_t i = 0; ok && i < u.times.size(); ++i)
        ok = u.norms[i] <= 5.0 * std::exp(-u.times[i]) * (1.0 + 1e-6);

    std::ostringstream os;
    os << "M3 = " << cert.M3 << ", C2 = " << cert.C2;
    criterion(3, "worked profile: M3 = 6, C2 = 5 (1e-6 rel); both trajectories under "
                 "5 e^{-t} (1 + 1e-6) to t = 30",
              ok, os.str());
}

// 4. Theorem 2.1 soundness sweep.
void criterion_4() {
    const double eps = 0.1;
    const Problem pb(make_spec("sin", "power_decay(2)", "const(0)", 2.0, 0.001, 50.0,
                               TailAssertion::alpha_integrable, 512));
    const LyapunovCertificate cert = check_lyapunov(pb, eps);
    const double closed_form = (eps / 3.0) * std::exp(-2.1);
    bool ok = cert.verdict == Verdict::holds &&
              std::abs(cert.delta_max - closed_form) / closed_form < 0.01;
    std::string note = "delta_max = " + std::to_string(cert.delta_max);

    // unit-scale budget sup for each beta shape; beta enters linearly
    const char* shapes[3] = {"const(1)", "exp_decay(1)", "pow(1+t,-2)"};
    double unit_sup[3] = {0, 0, 0};
    for (int s = 0; s < 3; ++s) {
        const Problem probe(make_spec("sin", "power_decay(2)", shapes[s], 2.0, 0.001, 50.0,
                                      TailAssertion::alpha_integrable, 512));
        unit_sup[s] = perturbation_budget_check(probe, eps).sup_value;
    }

    std::mt19937 rng(4);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 50 && ok; ++trial) {
        const double g0 = unif(rng) * cert.delta_max;
        const int s = trial % 3;
        const double scale = 0.9 * (eps / 3.0) / unit_sup[s] * (0.2 + 0.8 * unif(rng));
        const std::string beta =
            std::to_string(scale) + "*(" + std::string(shapes[s]) + ")";
        const Problem draw(make_spec("sin", "power_decay(2)", beta, 2.0, g0, 50.0,
                                     TailAssertion::alpha_integrable, 256));
        if (!perturbation_budget_check(draw, eps).holds) {
            ok = false;
            note = "budget scaling failed on trial " + std::to_string(trial);
            break;
        }
        IntegratorConfig cfg;
        const ScalarTrajectory traj = integrate_comparison(draw, cfg);
        if (traj.blowup.has_value()) {
            ok = false;
            note = "unexpected blow-up on trial " + std::to_string(trial);
            break;
        }
        for (const double g : traj.values)
            if (!(g < eps)) {
                ok = false;
                note = "trajectory reached eps on trial " + std::to_string(trial);
                break;
            }
    }
    criterion(4, "delta_max within 1% of (eps/3) e^{-2.1}; 50 budgeted draws stay below "
                 "eps = 0.1 to t = 50",
              ok, note);
}

// 5. Theorem 2.4 / 2.7 end to end.
void criterion_5() {
    const ProblemSpec spec = make_spec("-1/(1+t)", "0.2*(1+t)/pow(2*t+1,2)", "pow(1+t,-3)",
                                       2.0, 1.0, 2e6);
    const Problem pb(spec);
    const ZetaCertificate zc = check_zeta_certificate(pb, 2.0);
    bool ok = zc.verdict == Verdict::holds;
    std::string note = "zeta margin = " + std::to_string(zc.margin);

    if (ok) {
        const Decay27Certificate dc = check_decay_27(pb, zc);
        ok = dc.verdict == Verdict::holds;
        if (!ok) note = "decay verdict: " + to_string(dc.verdict);
    }
    if (ok && zc.envelope) {
        IntegratorConfig cfg;
        cfg.rel_tol = 1e-10;
        cfg.abs_tol = 1e-300;
        const TestSystem sys = build_sharp_system(spec, 4, 0);
        const VectorTrajectory u = integrate_system(sys, cfg, 100.0);
        const EnvelopeCheck env = check_envelope(u, *zc.envelope);
        ok = env.holds && u.norms.back() < 0.1 * u.norms.front();
        note = "worst envelope margin " + std::to_string(env.worst_margin) +
               ", |u(100)| = " + std::to_string(u.norms.back());
    }
    criterion(5, "zeta certificate holds at q = 2; sharp system under q zeta; decay "
                 "verdict and 10x norm drop by t = 100",
              ok, note);
}

// 6. Comparison-principle ordering on 100 random beta pairs.
void criterion_6() {
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    IntegratorConfig cfg;
    cfg.dense_samples = 201;
    bool ok = true;
    std::string note;
    for (int trial = 0; trial < 100 && ok; ++trial) {
        const std::string gamma = "const(" + std::to_string(-1.0 + 1.2 * unif(rng)) + ")";
        const std::string alpha = std::to_string(0.01 * unif(rng)) + "*exp(-" +
                                  std::to_string(0.5 + 2.0 * unif(rng)) + "*t)";
        const double b = 0.2 * unif(rng);
        const double extra = 0.2 * unif(rng);
        const double k = 0.5 + 2.0 * unif(rng);
        const std::string beta1 = "const(" + std::to_string(b) + ")";
        const std::string beta2 = "const(" + std::to_string(b) + ") + " +
                                  std::to_string(extra) + "*exp(-" + std::to_string(k) +
                                  "*t)";
        const double g0 = 0.5 * unif(rng);
        const Problem lo(make_spec(gamma, alpha, beta1, 2.0, g0, 10.0,
                                   TailAssertion::none, 128));
        const Problem hi(make_spec(gamma, alpha, beta2, 2.0, g0, 10.0,
                                   TailAssertion::none, 128));
        const ScalarTrajectory tl = integrate_comparison(lo, cfg);
        const ScalarTrajectory th = integrate_comparison(hi, cfg);
        if (tl.blowup || th.blowup || tl.times.size() != th.times.size()) {
            ok = false;
            note = "unexpected blow-up on trial " + std::to_string(trial);
            break;
        }
        for (std::size_t i = 0; i < tl.times.size(); ++i)
            if (tl.values[i] > th.values[i] + 1e-9) {
                ok = false;
                note = "ordering violated at t = " + std::to_string(tl.times[i]);
                break;
            }
    }
    criterion(6, "pointwise trajectory ordering for 100 beta1 <= beta2 pairs (1e-9)", ok,
              note);
}

// 7. Sharpness invariants on 1e3 random vectors per seeded system.
void criterion_7() {
    const ProblemSpec spec =
        make_spec("sin", "exp_decay(1)", "power_decay(2)", 2.0, 1.0, 20.0);
    bool ok = true;
    std::string note;
    const std::pair<int, std::uint64_t> setups[3] = {{2, 1}, {4, 2}, {8, 3}};
    for (const auto& [n, seed] : setups) {
        const TestSystem sys = build_sharp_system(spec, n, seed);
        std::mt19937_64 rng(seed + 100);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int trial = 0; trial < 1000 && ok; ++trial) {
            Eigen::VectorXd u(n);
            for (int i = 0; i < n; ++i) u[i] = gauss(rng);
            const double t = 20.0 * (trial % 100) / 100.0;
            const double n2 = u.squaredNorm();

            const double quad = u.dot(sys.a_matrix(t) * u);
            if (std::abs(quad - sys.gamma(t) * n2) >
                1e-12 * n2 * (std::abs(sys.gamma(t)) + 1.0)) {
                ok = false;
                note = "quadratic form at n = " + std::to_string(n);
            }
            const double gn = sys.nonlinearity(t, u).norm();
            const double target = sys.alpha(t) * std::pow(u.norm(), 2.0);
            if (std::abs(gn - target) > 1e-12 * (target + 1e-300)) {
                ok = false;
                note = "nonlinearity norm at n = " + std::to_string(n);
            }
            const double fn = sys.forcing(t, u).norm();
            if (std::abs(fn - sys.beta(t)) > 1e-12 * (sys.beta(t) + 1e-300)) {
                ok = false;
                note = "forcing norm at n = " + std::to_string(n);
            }
        }
    }
    criterion(7, "Re<u,Au> = gamma|u|^2, |G| = alpha|u|^p, |f| = beta to 1e-12 relative "
                 "(1e3 vectors x 3 systems)",
              ok, note);
}

// 8. Necessity witness: gamma = 1 defeats every stability certificate and the
//    oracle grows without bound.
void criterion_8() {
    const Problem pb(make_spec("const(1)", "const(0)", "const(0)", 2.0, 1.0, 20.0,
                               TailAssertion::none, 512));
    bool ok = check_lyapunov(pb, 0.1).verdict == Verdict::fails;
    ok = ok && !search_omega(pb).omega.has_value();
    ok = ok && !search_small_data(pb).C.has_value();

    // Theorem 2.4 holds vacuously here (alpha = beta = 0) but certifies no
    // boundedness or decay; 2.7 must not certify either
    const QSearch qs = search_q(pb);
    if (qs.certificate) {
        ok = ok && !qs.certificate->bounded_flag && !qs.certificate->decay_flag;
        ok = ok && check_bounded_27(pb, *qs.certificate).verdict != Verdict::holds;
        ok = ok && check_decay_27(pb, *qs.certificate).verdict != Verdict::holds;
    }

    IntegratorConfig cfg;
    const ScalarTrajectory traj = integrate_comparison(pb, cfg, 10.0);
    double first_cross = -1.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        if (traj.values[i] > 1e4) {
            first_cross = traj.times[i];
            break;
        }
    ok = ok && first_cross > 0.0 && first_cross < 10.0;
    criterion(8, "gamma = 1: no stability certificate; oracle exceeds 1e4 before t = 10",
              ok, first_cross > 0 ? "crossed at t = " + std::to_string(first_cross) : "");
}

// 9. Determinism of the CLI outputs.
void criterion_9() {
    const fs::path dir = fs::temp_directory_path() / "stabcert_acceptance";
    fs::create_directories(dir);
    const fs::path cfg = dir / "det.cfg";
    {
        std::ofstream out(cfg);
        out << "[profile]\ngamma = sin\nalpha = 0.05*exp(-t)\nbeta = 0.001*pow(1+t,-2)\n"
               "p = 2\n[problem]\ng0 = 0.01\nhorizon = 30\n[numerics]\ngrid_points = 256\n";
    }
    const auto run = [&](const std::string& sub, const fs::path& out) {
        const std::string cmd = std::string(STABCERT_CLI_PATH) + " " + sub + " --config " +
                                cfg.string() + " --out " + out.string() +
                                " --seed 11 > /dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    run("check", dir / "c1");
    run("check", dir / "c2");
    run("simulate", dir / "s1");
    run("simulate", dir / "s2");
    const bool ok =
        !slurp(dir / "c1" / "certificates.csv").empty() &&
        slurp(dir / "c1" / "certificates.csv") == slurp(dir / "c2" / "certificates.csv") &&
        slurp(dir / "s1" / "trajectory_scalar.csv") ==
            slurp(dir / "s2" / "trajectory_scalar.csv") &&
        slurp(dir / "s1" / "trajectory_vector.csv") ==
            slurp(dir / "s2" / "trajectory_vector.csv");
    criterion(9, "byte-identical CSVs from identical check and simulate manifests", ok);
}

void guarded(void (*fn)(), int n, const char* desc) {
    try {
        fn();
    } catch (const std::exception& e) {
        criterion(n, desc, false, std::string("exception: ") + e.what());
    }
}

}  // namespace

int main() {
    guarded(criterion_1, 1, "Bernoulli oracle equivalence");
    guarded(criterion_2, 2, "blow-up agreement");
    guarded(criterion_3, 3, "Theorem 2.3 envelope soundness");
    guarded(criterion_4, 4, "Theorem 2.1 soundness sweep");
    guarded(criterion_5, 5, "Theorem 2.4/2.7 end to end");
    guarded(criterion_6, 6, "comparison-principle ordering");
    guarded(criterion_7, 7, "sharpness invariants");
    guarded(criterion_8, 8, "necessity witness");
    guarded(criterion_9, 9, "CLI determinism");
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures ? 1 : 0;
}
