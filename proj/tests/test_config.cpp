#include <doctest.h>

#include <cmath>

#include "stabcert/config.hpp"
#include "stabcert/errors.hpp"

using namespace stabcert;

namespace {

const char* kGoodConfig = R"(# motivating case: oscillating gamma, integrable alpha
[profile]
gamma = sin
alpha = power_decay(2)
beta = const(0)
p = 2

[problem]
g0 = 0.001
horizon = 50

[numerics]
quad_tol = 1e-9
grid_points = 256
)";

}  // namespace

TEST_CASE("load_profile accepts the motivating configuration") {
    const ProblemSpec spec = load_profile(kGoodConfig);
    CHECK(spec.profile.p == 2.0);
    CHECK(spec.g0 == doctest::Approx(0.001));
    CHECK(spec.horizon == 50.0);
    CHECK(spec.tail == TailAssertion::none);
    CHECK(spec.numerics.grid_points == 256);
    CHECK(spec.profile.gamma(M_PI_2) == doctest::Approx(1.0));
    CHECK(spec.profile.alpha(1.0) == doctest::Approx(0.25));
}

TEST_CASE("defaults: horizon 100, quad_tol 1e-9, eps 0.1") {
    const LoadedConfig cfg = load_config(
        "[profile]\ngamma = sin\nalpha = const(0)\nbeta = const(0)\np = 2\n"
        "[problem]\ng0 = 0\n");
    CHECK(cfg.spec.horizon == 100.0);
    CHECK(cfg.spec.numerics.quad_tol == 1e-9);
    CHECK(cfg.eps == 0.1);
}

TEST_CASE("tail assertions parse") {
    const LoadedConfig cfg = load_config(
        "[profile]\ngamma = sin\nalpha = power_decay(2)\nbeta = const(0)\np = 2\n"
        "[problem]\ng0 = 0.1\ntail = alpha_integrable\n");
    CHECK(cfg.spec.tail == TailAssertion::alpha_integrable);
}

TEST_CASE("validation errors: p <= 1, negative alpha, negative g0") {
    CHECK_THROWS_AS(load_profile("[profile]\ngamma = sin\nalpha = const(0)\n"
                                 "beta = const(0)\np = 1\n[problem]\ng0 = 0\n"),
                    ValidationError);
    CHECK_THROWS_AS(load_profile("[profile]\ngamma = sin\nalpha = const(-1)\n"
                                 "beta = const(0)\np = 2\n[problem]\ng0 = 0\n"),
                    ValidationError);
    CHECK_THROWS_AS(load_profile("[profile]\ngamma = sin\nalpha = const(0)\n"
                                 "beta = const(0)\np = 2\n[problem]\ng0 = -2\n"),
                    ValidationError);
    CHECK_THROWS_AS(load_profile("[profile]\ngamma = sin\np = 2\n[problem]\ng0 = 0\n"),
                    ValidationError);
}

TEST_CASE("parse errors carry line and column") {
    try {
        load_profile("[profile]\ngamma = sin(\nalpha = const(0)\nbeta = const(0)\np = 2\n"
                     "[problem]\ng0 = 0\n");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() >= 9);
    }
    try {
        load_profile("[profile]\nbogus_key = 1\n");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(load_profile("[nope]\n"), ParseError);
    CHECK_THROWS_AS(load_profile("gamma = sin\n"), ParseError);  // key outside a section
    CHECK_THROWS_AS(load_profile("[problem]\ng0 = not_a_number\n"), ParseError);
}
