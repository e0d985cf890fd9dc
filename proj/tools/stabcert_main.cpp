#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "stabcert/certificates.hpp"
#include "stabcert/comparison.hpp"
#include "stabcert/config.hpp"
#include "stabcert/errors.hpp"
#include "stabcert/report.hpp"
#include "stabcert/systems.hpp"

namespace fs = std::filesystem;
using namespace stabcert;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = "out";
    std::string batch_dir;
    std::optional<double> horizon;
    std::optional<double> quad_tol;
    std::optional<double> rel_tol;
    int dim = 4;
    std::uint64_t seed = 0;
    bool worst_case = false;
    bool adversarial = false;
    bool corrupt_envelope = false;  // test hook: shrink held envelopes to force exit 4
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string manifest_text(const std::string& subcommand, const std::string& config,
                          const fs::path& out, const Options& opts, bool with_system,
                          std::uint64_t profile_hash) {
    std::ostringstream os;
    os << "[run]\n";
    os << "subcommand = " << subcommand << '\n';
    os << "config = " << config << '\n';
    os << "out = " << out.string() << '\n';
    os << "timestamp = " << timestamp_utc() << '\n';
    os << "\n[overrides]\n";
    if (opts.horizon) os << "horizon = " << format_double(*opts.horizon) << '\n';
    if (opts.quad_tol) os << "quad_tol = " << format_double(*opts.quad_tol) << '\n';
    if (opts.rel_tol) os << "rel_tol = " << format_double(*opts.rel_tol) << '\n';
    if (with_system) {
        os << "\n[system]\n";
        os << "seed = " << opts.seed << '\n';
        os << "dim = " << opts.dim << '\n';
        os << "worst_case = " << (opts.worst_case ? 1 : 0) << '\n';
        os << "adversarial_forcing = " << (opts.adversarial ? 1 : 0) << '\n';
        char hex[32];
        std::snprintf(hex, sizeof(hex), "0x%016llx",
                      static_cast<unsigned long long>(profile_hash));
        os << "profile_hash = " << hex << '\n';
    }
    return os.str();
}

LoadedConfig load_with_overrides(const std::string& path, const Options& opts) {
    LoadedConfig cfg = load_config_file(path);
    if (opts.horizon) cfg.spec.horizon = *opts.horizon;
    if (opts.quad_tol) cfg.spec.numerics.quad_tol = *opts.quad_tol;
    validate(cfg.spec);
    return cfg;
}

IntegratorConfig integrator_config(const Options& opts) {
    IntegratorConfig icfg;
    if (opts.rel_tol) icfg.rel_tol = *opts.rel_tol;
    return icfg;
}

CertificateSet run_all_checkers(const Problem& pb, double eps) {
    CertificateSet set;
    set.eps = eps;
    set.lyapunov = check_lyapunov(pb, eps);
    set.budget = perturbation_budget_check(pb, eps);

    OmegaSearch om = search_omega(pb);
    set.omega = om.omega;
    set.global_bound = std::move(om.certificate);

    SmallDataSearch sd = search_small_data(pb);
    set.small_data_C = sd.C;
    set.small_data = std::move(sd.certificate);

    ZetaCertificate no_zeta;  // default verdict: inconclusive (pre not established)
    try {
        QSearch qs = search_q(pb);
        set.q = qs.q;
        set.zeta_cert = std::move(qs.certificate);
    } catch (const ZeroInitialNormError&) {
        // g0 = 0: Theorem 2.4 does not apply
    }
    const ZetaCertificate& zc = set.zeta_cert ? *set.zeta_cert : no_zeta;
    set.bounded27 = check_bounded_27(pb, zc);
    try {
        set.decay27 = check_decay_27(pb, zc);
    } catch (const GammaVanishesError& e) {
        Decay27Certificate cert;
        cert.verdict = Verdict::inconclusive;
        cert.caveats.push_back(e.what());
        set.decay27 = cert;
    }
    return set;
}

int exit_code_for(const CertificateSet& set) {
    std::vector<Verdict> verdicts;
    verdicts.push_back(set.lyapunov ? set.lyapunov->verdict : Verdict::fails);
    verdicts.push_back(set.global_bound ? set.global_bound->verdict : Verdict::fails);
    verdicts.push_back(set.small_data ? set.small_data->verdict : Verdict::fails);
    verdicts.push_back(set.zeta_cert ? set.zeta_cert->verdict : Verdict::fails);
    if (set.bounded27) verdicts.push_back(set.bounded27->verdict);
    if (set.decay27) verdicts.push_back(set.decay27->verdict);

    bool any_holds = false, all_fail = true;
    for (const Verdict v : verdicts) {
        if (v == Verdict::holds) any_holds = true;
        if (v != Verdict::fails) all_fail = false;
    }
    if (any_holds) return 0;
    if (all_fail) return 3;
    return 2;
}

std::vector<Envelope> held_envelopes(const CertificateSet& set, bool corrupt) {
    std::vector<Envelope> envs;
    if (set.global_bound && set.global_bound->verdict == Verdict::holds &&
        set.global_bound->envelope)
        envs.push_back(*set.global_bound->envelope);
    if (set.zeta_cert && set.zeta_cert->verdict == Verdict::holds && set.zeta_cert->envelope)
        envs.push_back(*set.zeta_cert->envelope);
    if (corrupt) {
        for (Envelope& env : envs) {
            env.log_value = [orig = env.log_value](double t) {
                return orig(t) + std::log(1e-3);
            };
            env.caveats.push_back("envelope constant corrupted by the test hook");
        }
    }
    return envs;
}

int run_check(const std::string& config, const fs::path& out, const Options& opts) {
    const LoadedConfig cfg = load_with_overrides(config, opts);
    const Problem pb(cfg.spec);
    const CertificateSet set = run_all_checkers(pb, cfg.eps);

    write_file(out / "report.txt", render_report(cfg.spec, set));
    write_file(out / "certificates.csv", render_certificates_csv(set));
    write_file(out / "manifest.txt", manifest_text("check", config, out, opts, false, 0));
    return exit_code_for(set);
}

int run_simulate(const std::string& config, const fs::path& out, const Options& opts) {
    const LoadedConfig cfg = load_with_overrides(config, opts);
    const Problem pb(cfg.spec);
    const CertificateSet set = run_all_checkers(pb, cfg.eps);
    const std::vector<Envelope> envs = held_envelopes(set, opts.corrupt_envelope);

    const IntegratorConfig icfg = integrator_config(opts);
    const ScalarTrajectory scalar = integrate_comparison(pb, icfg);

    SystemToggles toggles;
    toggles.worst_case = opts.worst_case;
    toggles.adversarial_forcing = opts.adversarial;
    const TestSystem system = build_sharp_system(cfg.spec, opts.dim, opts.seed, toggles);
    const VectorTrajectory vec = integrate_system(system, icfg, pb.horizon());

    std::vector<EnvelopeReportRow> rows;
    bool violated = false;
    for (const Envelope& env : envs) {
        EnvelopeReportRow a{env.provenance, "scalar_oracle", check_envelope(scalar, env)};
        EnvelopeReportRow b{env.provenance, "sharp_system", check_envelope(vec, env)};
        violated = violated || !a.check.holds || !b.check.holds;
        rows.push_back(std::move(a));
        rows.push_back(std::move(b));
    }

    write_file(out / "trajectory_scalar.csv", render_scalar_csv(scalar));
    write_file(out / "trajectory_vector.csv", render_vector_csv(vec));
    write_file(out / "report.txt",
               render_report(cfg.spec, set) + "\n" + render_envelope_section(rows));
    write_file(out / "manifest.txt",
               manifest_text("simulate", config, out, opts, true, system.profile_hash()));

    if (scalar.blowup)
        std::cout << "scalar oracle blow-up at t=" << format_double(scalar.blowup->time)
                  << '\n';
    for (const auto& row : rows)
        std::cout << to_string(row.id) << " vs " << row.target << ": "
                  << (row.check.holds ? "respected" : "VIOLATED")
                  << " (worst margin " << format_double(row.check.worst_margin) << ")\n";
    return violated ? 4 : 0;
}

int run_blowup(const std::string& config, const fs::path& out, const Options& opts) {
    const LoadedConfig cfg = load_with_overrides(config, opts);
    const Problem pb(cfg.spec);
    if (pb.int_beta(pb.horizon()) > 0.0) {
        std::cerr << "blowup requires beta == 0 (the closed form covers only the "
                     "beta-free equation)\n";
        return 1;
    }
    const BlowUpEstimate est = estimate_blowup_time(pb);

    IntegratorConfig icfg = integrator_config(opts);
    const ScalarTrajectory traj = integrate_comparison(pb, icfg);

    std::ostringstream os;
    os << "[blowup]\n";
    int code = 0;
    if (est.t0) {
        std::cout << "estimated blow-up time t0 = " << format_double(*est.t0) << '\n';
        os << "t0 = " << format_double(*est.t0) << '\n';
        os << "residual = " << format_double(est.residual) << '\n';
        if (traj.blowup) {
            const double diff = std::abs(traj.blowup->time - *est.t0);
            os << "oracle_event = " << format_double(traj.blowup->time) << '\n';
            os << "difference = " << format_double(diff) << '\n';
            code = diff <= std::max(1e-2, 10.0 * cfg.spec.numerics.root_tol) ? 0 : 4;
        } else {
            os << "oracle_event = none\n";
            code = 4;
        }
    } else {
        std::cout << "no blow-up within horizon\n";
        os << "t0 = none\n";
        os << "oracle_event = " << (traj.blowup ? format_double(traj.blowup->time) : "none")
           << '\n';
        code = traj.blowup ? 4 : 0;
    }
    for (const auto& c : est.caveats) os << "caveat = " << c << '\n';

    write_file(out / "report.txt", os.str());
    write_file(out / "trajectory_scalar.csv", render_scalar_csv(traj));
    write_file(out / "manifest.txt", manifest_text("blowup", config, out, opts, false, 0));
    if (code == 4) std::cerr << "blow-up estimate and oracle event disagree\n";
    return code;
}

int run_report(const std::string& config, const fs::path& out, const Options& opts) {
    const int chk = run_check(config, out, opts);
    const int sim = run_simulate(config, out, opts);
    return sim == 4 ? 4 : chk;
}

int dispatch(const std::string& sub, const std::string& config, const fs::path& out,
             const Options& opts) {
    fs::create_directories(out);
    if (sub == "check") return run_check(config, out, opts);
    if (sub == "simulate") return run_simulate(config, out, opts);
    if (sub == "blowup") return run_blowup(config, out, opts);
    return run_report(config, out, opts);
}

int run(const std::string& sub, const Options& opts) {
    try {
        if (!opts.batch_dir.empty()) {
            std::vector<fs::path> configs;
            for (const auto& entry : fs::directory_iterator(opts.batch_dir))
                if (entry.path().extension() == ".cfg") configs.push_back(entry.path());
            std::sort(configs.begin(), configs.end());
            if (configs.empty()) {
                std::cerr << "no .cfg files in " << opts.batch_dir << '\n';
                return 1;
            }
            int worst = 0;
            for (const auto& c : configs) {
                const fs::path out = fs::path(opts.out_dir) / c.stem();
                worst = std::max(worst, dispatch(sub, c.string(), out, opts));
            }
            return worst;
        }
        if (opts.config_path.empty()) {
            std::cerr << "either --config or --batch is required\n";
            return 1;
        }
        return dispatch(sub, opts.config_path, fs::path(opts.out_dir), opts);
    } catch (const ParseError& e) {
        std::cerr << "config parse error: " << e.what() << '\n';
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "config validation error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stability certificates and sharp test systems for "
                 "du/dt = A(t)u + G(t,u) + f(t)"};
    app.require_subcommand(1);

    Options opts;
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config_path, "profile config file");
        cmd->add_option("--out", opts.out_dir, "output directory (created if absent)");
        cmd->add_option("--batch", opts.batch_dir, "process every .cfg in a directory");
        cmd->add_option("--horizon", opts.horizon, "override the problem horizon");
        cmd->add_option("--quad-tol", opts.quad_tol, "override the quadrature tolerance");
        cmd->add_option("--rel-tol", opts.rel_tol, "integrator relative tolerance");
        cmd->add_option("--seed", opts.seed, "seed for the sharp-system construction");
        cmd->add_option("--dim", opts.dim, "sharp-system dimension");
        cmd->add_flag("--worst-case", opts.worst_case,
                      "radial nonlinearity (equality in the inner-product step)");
        cmd->add_flag("--adversarial-forcing", opts.adversarial,
                      "align the forcing with u/||u||");
        cmd->add_flag("--corrupt-envelope", opts.corrupt_envelope,
                      "test hook: corrupt held envelopes to exercise exit code 4");
    };

    add_common(app.add_subcommand("check", "run every certificate checker"));
    add_common(app.add_subcommand("simulate",
                                  "integrate the oracle and a sharp system, check envelopes"));
    add_common(app.add_subcommand("blowup", "estimate the blow-up time and cross-check"));
    add_common(app.add_subcommand("report", "check + simulate in one run"));

    CLI11_PARSE(app, argc, argv);
    return run(app.get_subcommands().front()->get_name(), opts);
}
