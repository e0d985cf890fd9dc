#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "stabcert/errors.hpp"
#include "stabcert/quadrature.hpp"

using namespace stabcert;

TEST_CASE("adaptive Simpson matches closed forms at tolerance") {
    QuadratureOptions opts;
    opts.abs_tol = 1e-10;
    CHECK(integrate([](double t) { return std::sin(t); }, 0.0, M_PI, opts) ==
          doctest::Approx(2.0).epsilon(1e-9));
    CHECK(integrate([](double t) { return std::exp(-t); }, 0.0, 50.0, opts) ==
          doctest::Approx(1.0 - std::exp(-50.0)).epsilon(1e-9));
    CHECK(integrate([](double t) { return t * t * t; }, 0.0, 2.0, opts) ==
          doctest::Approx(4.0).epsilon(1e-12));
    // reversed bounds flip the sign
    CHECK(integrate([](double t) { return t; }, 2.0, 0.0, opts) == doctest::Approx(-2.0));
    CHECK(integrate([](double t) { return t; }, 3.0, 3.0, opts) == 0.0);
}

TEST_CASE("adaptive Simpson agrees with the Richardson oracle on a rough integrand") {
    const auto f = [](double t) { return std::sin(t) / std::sqrt(1.0 + t); };
    const double ref = oracle::simpson_richardson(f, 0.0, 10.0, 1 << 14);
    QuadratureOptions opts;
    opts.abs_tol = 1e-9;
    CHECK(integrate(f, 0.0, 10.0, opts) == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("non-finite integrands are rejected") {
    CHECK_THROWS_AS(integrate([](double t) { return 1.0 / t; }, 0.0, 1.0),
                    QuadratureDivergenceError);
    CHECK_THROWS_AS(integrate([](double t) { return std::log(t); }, 0.0, 1.0),
                    QuadratureDivergenceError);
}

TEST_CASE("subdivision cap trips on a needle the tolerance cannot resolve") {
    QuadratureOptions opts;
    opts.abs_tol = 1e-16;
    opts.rel_floor = 0.0;
    opts.max_subdivisions = 64;
    const auto needle = [](double t) { return std::exp(-1e6 * (t - 0.3537) * (t - 0.3537)); };
    CHECK_THROWS_AS(integrate(needle, 0.0, 1.0, opts), QuadratureDivergenceError);
}
