#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "stabcert/certificates.hpp"
#include "stabcert/coefficients.hpp"
#include "stabcert/comparison.hpp"

namespace stabcert {

struct SystemToggles {
    /// G = alpha ||u||^{p-1} u (radial), achieving equality in the
    /// inner-product step. Requires p >= 2: the radial map has limited
    /// smoothness at u = 0 for p < 2.
    bool worst_case = false;
    /// Align the forcing direction with u/||u|| to saturate <u, f> <= beta ||u||.
    bool adversarial_forcing = false;
};

/// A concrete R^n instance du/dt = A(t)u + G(t,u) + f(t) saturating the
/// operator bounds exactly:
///   A(t) = gamma(t) I + cos(t) S0   with S0 skew-symmetric (unit Frobenius),
///   G(t,u) = alpha(t) ||u||^{p-1} Q u   with Q orthogonal,
///   f(t) = beta(t) e   with e a fixed unit vector,
///   u(0) = g0 e1.
class TestSystem {
public:
    int dimension() const noexcept { return n_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const SystemToggles& toggles() const noexcept { return toggles_; }
    double p() const noexcept { return p_; }
    const Eigen::MatrixXd& skew() const noexcept { return S0_; }
    const Eigen::MatrixXd& rotation() const noexcept { return Q_; }
    const Eigen::VectorXd& forcing_direction() const noexcept { return e_; }
    const Eigen::VectorXd& initial_state() const noexcept { return u0_; }
    std::uint64_t profile_hash() const noexcept { return profile_hash_; }

    double gamma(double t) const { return gamma_(t); }
    double alpha(double t) const { return alpha_(t); }
    double beta(double t) const { return beta_(t); }

    Eigen::MatrixXd a_matrix(double t) const;
    Eigen::VectorXd nonlinearity(double t, const Eigen::VectorXd& u) const;
    Eigen::VectorXd forcing(double t, const Eigen::VectorXd& u) const;
    Eigen::VectorXd rhs(double t, const Eigen::VectorXd& u) const;

    friend TestSystem build_sharp_system(const ProblemSpec& spec, int n, std::uint64_t seed,
                                         const SystemToggles& toggles);

private:
    int n_ = 0;
    std::uint64_t seed_ = 0;
    SystemToggles toggles_;
    double p_ = 2.0;
    TimeFunction gamma_, alpha_, beta_;
    Eigen::MatrixXd S0_, Q_;
    Eigen::VectorXd e_, u0_;
    std::uint64_t profile_hash_ = 0;
};

/// Deterministic per (spec, seed, toggles). Throws DimensionError for n < 2
/// and ValidationError for worst_case with p < 2.
TestSystem build_sharp_system(const ProblemSpec& spec, int n, std::uint64_t seed,
                              const SystemToggles& toggles = {});

struct VectorTrajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    std::vector<double> norms;
    std::optional<BlowupEvent> blowup;
    IntegratorStats stats;
};

/// Same embedded pair and blow-up handling as the scalar oracle, on R^n.
VectorTrajectory integrate_system(const TestSystem& system, const IntegratorConfig& cfg,
                                  double t_end);

struct EnvelopeCheck {
    bool holds = false;
    double worst_margin = 0.0;  // min over samples of E(t) - ||u(t)||
    double worst_time = 0.0;
};

/// Compares sample norms against E(t); holds iff the worst margin stays above
/// -1e-6 * max(E).
EnvelopeCheck check_envelope(const VectorTrajectory& trajectory, const Envelope& envelope);
EnvelopeCheck check_envelope(const ScalarTrajectory& trajectory, const Envelope& envelope);

}  // namespace stabcert
