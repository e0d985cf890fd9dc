#pragma once

#include <string>

#include "stabcert/coefficients.hpp"
#include "stabcert/expr.hpp"

namespace testutil {

inline stabcert::ProblemSpec make_spec(
    const std::string& gamma, const std::string& alpha, const std::string& beta, double p,
    double g0, double horizon = 100.0,
    stabcert::TailAssertion tail = stabcert::TailAssertion::none, int grid_points = 1024) {
    stabcert::ProblemSpec spec;
    spec.profile.gamma = stabcert::TimeFunction::parse(gamma);
    spec.profile.alpha = stabcert::TimeFunction::parse(alpha);
    spec.profile.beta = stabcert::TimeFunction::parse(beta);
    spec.profile.p = p;
    spec.g0 = g0;
    spec.horizon = horizon;
    spec.tail = tail;
    spec.numerics.grid_points = grid_points;
    return spec;
}

}  // namespace testutil
