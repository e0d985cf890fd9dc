#include "stabcert/report.hpp"

#include <cstdio>
#include <sstream>

namespace stabcert {

namespace {

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

using KV = std::vector<std::pair<std::string, double>>;

std::string pack(const KV& kv) {
    std::vector<std::string> parts;
    parts.reserve(kv.size());
    for (const auto& [k, v] : kv) parts.push_back(k + "=" + format_double(v));
    return join(parts, ";");
}

void csv_row(std::ostringstream& os, TheoremId id, Verdict verdict, const KV& constants,
             const KV& margins, const std::vector<std::string>& caveats) {
    os << to_string(id) << ',' << to_string(verdict) << ',' << csv_quote(pack(constants))
       << ',' << csv_quote(pack(margins)) << ',' << csv_quote(join(caveats, "|")) << '\n';
}

void report_section(std::ostringstream& os, const std::string& name, Verdict verdict,
                    const KV& fields, const std::vector<std::string>& caveats) {
    os << "[certificate " << name << "]\n";
    os << "verdict = " << to_string(verdict) << '\n';
    for (const auto& [k, v] : fields) os << k << " = " << fmt12(v) << '\n';
    if (!caveats.empty()) os << "caveats = " << join(caveats, " | ") << '\n';
    os << '\n';
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string render_report(const ProblemSpec& spec, const CertificateSet& set) {
    std::ostringstream os;
    os << "[profile]\n";
    os << "gamma = " << spec.profile.gamma.source() << '\n';
    os << "alpha = " << spec.profile.alpha.source() << '\n';
    os << "beta = " << spec.profile.beta.source() << '\n';
    os << "p = " << fmt12(spec.profile.p) << '\n';
    os << "\n[problem]\n";
    os << "g0 = " << fmt12(spec.g0) << '\n';
    os << "horizon = " << fmt12(spec.horizon) << '\n';
    os << "tail = " << to_string(spec.tail) << '\n';
    os << "eps = " << fmt12(set.eps) << '\n';
    os << '\n';

    if (set.lyapunov) {
        const auto& c = *set.lyapunov;
        KV fields{{"eps", c.eps},
                  {"M", c.M},
                  {"M_attained_at", c.M_attained_at},
                  {"int_alpha", c.int_alpha},
                  {"M1", c.M1},
                  {"delta_max", c.delta_max},
                  {"beta_budget", c.beta_budget}};
        if (set.budget) {
            fields.push_back({"budget_sup", set.budget->sup_value});
            fields.push_back({"budget_holds", set.budget->holds ? 1.0 : 0.0});
        }
        report_section(os, "lyapunov_2.1", c.verdict, fields, c.caveats);
    }
    if (set.global_bound) {
        const auto& c = *set.global_bound;
        KV fields{{"omega", c.omega},       {"I_inf", c.I_inf},
                  {"M", c.M},               {"eq11_margin_rel", c.eq11_margin_rel},
                  {"forcing_sup", c.forcing_sup},
                  {"M3", c.M3},             {"C2", c.C2},
                  {"decay_flag", c.decay_flag ? 1.0 : 0.0}};
        report_section(os, "global_bound_2.3", c.verdict, fields, c.caveats);
    } else {
        report_section(os, "global_bound_2.3", Verdict::fails, {},
                       {"no feasible omega found"});
    }
    if (set.small_data) {
        const auto& c = *set.small_data;
        KV fields{{"C", c.C}, {"C1", c.C1}, {"lhs", c.lhs}, {"margin_rel", c.margin_rel}};
        report_section(os, "small_data_2.5", c.verdict, fields, c.caveats);
    } else {
        report_section(os, "small_data_2.5", Verdict::fails, {}, {"no feasible C found"});
    }
    if (set.zeta_cert) {
        const auto& c = *set.zeta_cert;
        KV fields{{"q", c.q},
                  {"margin", c.margin},
                  {"worst_time", c.worst_time},
                  {"bounded_flag", c.bounded_flag ? 1.0 : 0.0},
                  {"decay_flag", c.decay_flag ? 1.0 : 0.0}};
        report_section(os, "zeta_2.4", c.verdict, fields, c.caveats);
    } else {
        report_section(os, "zeta_2.4", Verdict::fails, {}, {"no feasible q found"});
    }
    if (set.bounded27) {
        const auto& c = *set.bounded27;
        KV fields{{"L", c.L},
                  {"L_attained_at", c.L_attained_at},
                  {"int_beta", c.int_beta},
                  {"bound", c.bound}};
        report_section(os, "bounded_2.7a", c.verdict, fields, c.caveats);
    }
    if (set.decay27) {
        const auto& c = *set.decay27;
        KV fields{{"gamma_integral_at_horizon", c.gamma_integral_at_horizon},
                  {"ratio_at_horizon", c.ratio_at_horizon},
                  {"skipped_gamma_zero", static_cast<double>(c.skipped_gamma_zero)}};
        report_section(os, "decay_2.7b", c.verdict, fields, c.caveats);
    }
    return os.str();
}

std::string render_certificates_csv(const CertificateSet& set) {
    std::ostringstream os;
    os << "theorem,verdict,constants,margins,caveats\n";
    if (set.lyapunov) {
        const auto& c = *set.lyapunov;
        KV constants{{"eps", c.eps},
                     {"M", c.M},
                     {"int_alpha", c.int_alpha},
                     {"M1", c.M1},
                     {"delta_max", c.delta_max},
                     {"beta_budget", c.beta_budget}};
        KV margins;
        if (set.budget) margins.push_back({"budget_sup", set.budget->sup_value});
        csv_row(os, TheoremId::lyapunov_21, c.verdict, constants, margins, c.caveats);
    }
    if (set.global_bound) {
        const auto& c = *set.global_bound;
        csv_row(os, TheoremId::global_bound_23, c.verdict,
                {{"omega", c.omega},
                 {"I_inf", c.I_inf},
                 {"M", c.M},
                 {"M3", c.M3},
                 {"C2", c.C2},
                 {"decay_flag", c.decay_flag ? 1.0 : 0.0}},
                {{"eq11_margin_rel", c.eq11_margin_rel}, {"forcing_sup", c.forcing_sup}},
                c.caveats);
    } else {
        csv_row(os, TheoremId::global_bound_23, Verdict::fails, {}, {},
                {"no feasible omega found"});
    }
    if (set.small_data) {
        const auto& c = *set.small_data;
        csv_row(os, TheoremId::small_data_25, c.verdict,
                {{"C", c.C}, {"C1", c.C1}, {"lhs", c.lhs}},
                {{"margin_rel", c.margin_rel}}, c.caveats);
    } else {
        csv_row(os, TheoremId::small_data_25, Verdict::fails, {}, {},
                {"no feasible C found"});
    }
    if (set.zeta_cert) {
        const auto& c = *set.zeta_cert;
        csv_row(os, TheoremId::zeta_24, c.verdict,
                {{"q", c.q},
                 {"bounded_flag", c.bounded_flag ? 1.0 : 0.0},
                 {"decay_flag", c.decay_flag ? 1.0 : 0.0}},
                {{"margin", c.margin}, {"worst_time", c.worst_time}}, c.caveats);
    } else {
        csv_row(os, TheoremId::zeta_24, Verdict::fails, {}, {}, {"no feasible q found"});
    }
    if (set.bounded27) {
        const auto& c = *set.bounded27;
        csv_row(os, TheoremId::bounded_27a, c.verdict,
                {{"L", c.L}, {"int_beta", c.int_beta}, {"bound", c.bound}}, {}, c.caveats);
    }
    if (set.decay27) {
        const auto& c = *set.decay27;
        csv_row(os, TheoremId::decay_27b, c.verdict,
                {{"gamma_integral_at_horizon", c.gamma_integral_at_horizon},
                 {"ratio_at_horizon", c.ratio_at_horizon},
                 {"skipped_gamma_zero", static_cast<double>(c.skipped_gamma_zero)}},
                {}, c.caveats);
    }
    return os.str();
}

std::string render_scalar_csv(const ScalarTrajectory& traj) {
    std::ostringstream os;
    os << "t,g\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        os << format_double(traj.times[i]) << ',' << format_double(traj.values[i]) << '\n';
    if (traj.blowup)
        os << "blowup," << format_double(traj.blowup->time) << ','
           << format_double(traj.blowup->threshold) << '\n';
    return os.str();
}

std::string render_vector_csv(const VectorTrajectory& traj) {
    std::ostringstream os;
    const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
    os << 't';
    for (int j = 0; j < n; ++j) os << ",u" << (j + 1);
    os << ",norm\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << format_double(traj.times[i]);
        for (int j = 0; j < n; ++j) os << ',' << format_double(traj.states[i][j]);
        os << ',' << format_double(traj.norms[i]) << '\n';
    }
    if (traj.blowup)
        os << "blowup," << format_double(traj.blowup->time) << ','
           << format_double(traj.blowup->threshold) << '\n';
    return os.str();
}

std::string render_envelope_section(const std::vector<EnvelopeReportRow>& rows) {
    std::ostringstream os;
    os << "[envelope_checks]\n";
    if (rows.empty()) os << "note = no held certificates produced envelopes\n";
    for (const auto& row : rows) {
        os << to_string(row.id) << "_vs_" << row.target << " = "
           << (row.check.holds ? "respected" : "violated")
           << " worst_margin=" << fmt12(row.check.worst_margin)
           << " worst_time=" << fmt12(row.check.worst_time) << '\n';
    }
    return os.str();
}

}  // namespace stabcert
