#pragma once

#include <string>
#include <string_view>

#include "stabcert/coefficients.hpp"

namespace stabcert {

/// Parsed config plus settings that ride along with it. eps drives the
/// Theorem 2.1 check; it has no place in the paper's data, so it defaults to
/// 0.1 and may be overridden with an optional `eps` key under [problem].
struct LoadedConfig {
    ProblemSpec spec;
    double eps = 0.1;
};

/// Config grammar: `key = value` lines under bracketed sections, `#` comments.
///
///   [profile]  gamma = <expr|name>, alpha = <expr|name>, beta = <expr|name>, p = <float>
///   [problem]  g0 = <float>, horizon = <float>,
///              tail = none|alpha_integrable|beta_integrable|gamma_sup_attained,
///              eps = <float>            (optional)
///   [numerics] quad_tol = <float>, grid_points = <int>
///
/// Throws ParseError with line/column for syntax problems and ValidationError
/// for semantic ones (alpha < 0, p <= 1, g0 < 0, missing keys).
LoadedConfig load_config(std::string_view text);
LoadedConfig load_config_file(const std::string& path);

/// Validated ProblemSpec from config text.
ProblemSpec load_profile(std::string_view config_text);

}  // namespace stabcert
