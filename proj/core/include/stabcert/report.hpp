#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stabcert/certificates.hpp"
#include "stabcert/comparison.hpp"
#include "stabcert/systems.hpp"

namespace stabcert {

/// Everything one `check` run produced, for rendering.
struct CertificateSet {
    double eps = 0.1;
    std::optional<LyapunovCertificate> lyapunov;
    std::optional<BudgetCheck> budget;
    std::optional<double> omega;
    std::optional<GlobalBoundCertificate> global_bound;
    std::optional<double> small_data_C;
    std::optional<SmallDataCertificate> small_data;
    std::optional<double> q;
    std::optional<ZetaCertificate> zeta_cert;
    std::optional<Bounded27Certificate> bounded27;
    std::optional<Decay27Certificate> decay27;
};

/// %.17g: round-trippable and byte-stable across runs.
std::string format_double(double v);

std::string render_report(const ProblemSpec& spec, const CertificateSet& set);

/// One CSV row per certificate: theorem, verdict, constants, margins, caveats.
std::string render_certificates_csv(const CertificateSet& set);

/// Columns t, g; a trailing `blowup,<time>,<threshold>` row when present.
std::string render_scalar_csv(const ScalarTrajectory& traj);

/// Columns t, u1..un, norm; same trailing blow-up row convention.
std::string render_vector_csv(const VectorTrajectory& traj);

struct EnvelopeReportRow {
    TheoremId id;
    std::string target;  // "scalar_oracle" or "sharp_system"
    EnvelopeCheck check;
};

std::string render_envelope_section(const std::vector<EnvelopeReportRow>& rows);

}  // namespace stabcert
