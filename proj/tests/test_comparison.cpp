#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "stabcert/comparison.hpp"
#include "stabcert/errors.hpp"

using namespace stabcert;
using testutil::make_spec;

TEST_CASE("linear decay: g(t) = e^{-t}") {
    const Problem pb(make_spec("const(-1)", "const(0)", "const(0)", 2.0, 1.0, 10.0));
    IntegratorConfig cfg;
    const ScalarTrajectory traj = integrate_comparison(pb, cfg);
    REQUIRE_FALSE(traj.blowup.has_value());
    // sample at t = 1
    double g1 = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        if (std::abs(traj.times[i] - 1.0) < 1e-9) g1 = traj.values[i];
    CHECK(g1 == doctest::Approx(std::exp(-1.0)).epsilon(1e-7));
    CHECK(traj.stats.steps > 0);
}

TEST_CASE("quadratic blow-up near t = 1") {
    const Problem pb(make_spec("const(0)", "const(1)", "const(0)", 2.0, 1.0, 5.0));
    IntegratorConfig cfg;
    const ScalarTrajectory traj = integrate_comparison(pb, cfg);
    REQUIRE(traj.blowup.has_value());
    CHECK(traj.blowup->time == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(traj.values.back() > traj.blowup->threshold);
    CHECK(traj.blowup->bracket_lo <= traj.blowup->time);
    CHECK(traj.blowup->bracket_hi >= traj.blowup->time - 1e-12);
}

TEST_CASE("trajectory values stay nonnegative") {
    const Problem pb(make_spec("sin(3*t)*2", "const(0)", "abs(cos(t))*0.01", 2.0, 0.0, 30.0));
    IntegratorConfig cfg;
    const ScalarTrajectory traj = integrate_comparison(pb, cfg);
    for (const double g : traj.values) CHECK(g >= 0.0);
}

TEST_CASE("exact_bernoulli") {
    SUBCASE("gamma = 0, alpha = 1, p = 2: g(0.5) = 2") {
        const Problem pb(make_spec("const(0)", "const(1)", "const(0)", 2.0, 1.0, 5.0));
        const BernoulliValue v = exact_bernoulli(pb, 0.5);
        REQUIRE_FALSE(v.blown_up);
        CHECK(v.value == doctest::Approx(2.0).epsilon(1e-8));
        CHECK(exact_bernoulli(pb, 1.5).blown_up);  // past t0 = 1
    }
    SUBCASE("decaying case matches the closed form at t = 1") {
        // frozen: e^{-1} / (1 - (1 - e^{-3})/3)
        const double expected = 0.53841608259978695;
        const Problem pb(make_spec("const(-1)", "exp_decay(2)", "const(0)", 2.0, 1.0, 30.0));
        CHECK(exact_bernoulli(pb, 1.0).value == doctest::Approx(expected).epsilon(1e-9));
    }
    SUBCASE("t = 0 returns g0") {
        const Problem pb(make_spec("sin", "exp_decay(1)", "const(0)", 3.0, 0.37, 10.0));
        CHECK(exact_bernoulli(pb, 0.0).value == doctest::Approx(0.37).epsilon(1e-14));
    }
    SUBCASE("preconditions") {
        const Problem with_beta(
            make_spec("const(0)", "const(1)", "const(0.1)", 2.0, 1.0, 5.0));
        CHECK_THROWS_AS(exact_bernoulli(with_beta, 1.0), ProfileHasBetaError);
        const Problem zero_g0(make_spec("const(0)", "const(1)", "const(0)", 2.0, 0.0, 5.0));
        CHECK_THROWS_AS(exact_bernoulli(zero_g0, 1.0), ZeroInitialNormError);
    }
}

TEST_CASE("verify_oracle_agreement") {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-9;
    cfg.abs_tol = 1e-14;
    SUBCASE("nonlinear decaying profile agrees to 1e-6") {
        const Problem pb(make_spec("const(-1)", "exp_decay(2)", "const(0)", 2.0, 1.0, 30.0));
        const OracleAgreement res = verify_oracle_agreement(pb, cfg);
        CHECK_FALSE(res.integrator_blowup);
        CHECK_FALSE(res.bernoulli_blowup);
        CHECK(res.max_rel_error < 1e-6);
    }
    SUBCASE("linear profile agrees to 1e-8") {
        const Problem pb(make_spec("sin", "const(0)", "const(0)", 2.0, 0.5, 30.0));
        CHECK(verify_oracle_agreement(pb, cfg).max_rel_error < 1e-8);
    }
    SUBCASE("blow-up profiles agree on the event time to 1e-3") {
        const Problem pb(make_spec("const(0)", "const(1)", "const(0)", 2.0, 1.0, 5.0));
        const OracleAgreement res = verify_oracle_agreement(pb, cfg);
        CHECK(res.integrator_blowup);
        CHECK(res.bernoulli_blowup);
        REQUIRE(res.blowup_time_diff.has_value());
        CHECK(*res.blowup_time_diff < 1e-3);
    }
}

TEST_CASE("comparison principle: larger beta never yields a smaller trajectory") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    IntegratorConfig cfg;
    cfg.dense_samples = 101;

    for (int trial = 0; trial < 20; ++trial) {
        const double gamma_c = -1.0 + 1.2 * unif(rng);
        const double alpha_c = 0.01 * unif(rng);
        const double k = 0.5 + 2.0 * unif(rng);
        const double b1 = 0.2 * unif(rng);
        const double extra = 0.2 * unif(rng);
        const double g0 = 0.5 * unif(rng);

        const std::string gamma = "const(" + std::to_string(gamma_c) + ")";
        const std::string alpha =
            std::to_string(alpha_c) + "*exp(-" + std::to_string(k) + "*t)";
        const std::string beta_lo = "const(" + std::to_string(b1) + ")";
        const std::string beta_hi = "const(" + std::to_string(b1) + ") + " +
                                    std::to_string(extra) + "*pow(1+t,-2)";

        const Problem lo(make_spec(gamma, alpha, beta_lo, 2.0, g0, 10.0));
        const Problem hi(make_spec(gamma, alpha, beta_hi, 2.0, g0, 10.0));
        const ScalarTrajectory tl = integrate_comparison(lo, cfg);
        const ScalarTrajectory th = integrate_comparison(hi, cfg);
        REQUIRE_FALSE(tl.blowup.has_value());
        REQUIRE_FALSE(th.blowup.has_value());
        REQUIRE(tl.times.size() == th.times.size());
        for (std::size_t i = 0; i < tl.times.size(); ++i)
            CHECK(tl.values[i] <= th.values[i] + 1e-9);
    }
}

TEST_CASE("tolerance convergence: halving rel_tol moves g(horizon) by < 10x the old tol") {
    const Problem pb(make_spec("sin", "pow(1+t,-2)", "const(0.001)", 2.0, 0.01, 20.0));
    IntegratorConfig c1;
    c1.rel_tol = 1e-6;
    c1.abs_tol = 1e-14;
    IntegratorConfig c2 = c1;
    c2.rel_tol = 5e-7;
    const double g1 = integrate_comparison(pb, c1).values.back();
    const double g2 = integrate_comparison(pb, c2).values.back();
    CHECK(std::abs(g1 - g2) < 10.0 * c1.rel_tol * std::max(g1, 1.0));
}

TEST_CASE("bernoulli blow-up time via the monotone table") {
    SUBCASE("g0 = 0.5 blows up at 2") {
        const Problem pb(make_spec("const(0)", "const(1)", "const(0)", 2.0, 0.5, 5.0));
        const auto t0 = bernoulli_blowup_time(pb);
        REQUIRE(t0.has_value());
        CHECK(*t0 == doctest::Approx(2.0).epsilon(1e-6));
    }
    SUBCASE("integrable alpha below the threshold never blows up") {
        const Problem pb(make_spec("const(-1)", "exp_decay(2)", "const(0)", 2.0, 1.0, 50.0));
        CHECK_FALSE(bernoulli_blowup_time(pb).has_value());
    }
}
