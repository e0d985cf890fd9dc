#pragma once

#include <stdexcept>
#include <string>

namespace stabcert {

/// Base class for all stabcert errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation time outside [0, horizon].
class TimeOutOfRangeError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature hit the subdivision cap without meeting tolerance,
/// or the integrand produced a non-finite value.
class QuadratureDivergenceError : public Error {
public:
    using Error::Error;
};

/// A linear-space value left the exponent range of double; callers should
/// switch to the log-space accessor.
class OverflowGuardError : public Error {
public:
    using Error::Error;
};

/// Config text failed to parse; carries 1-based line and column.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error(msg + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line_(line),
          column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

/// Config parsed but violates a profile constraint (alpha < 0, p <= 1, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Operation requires beta == 0 but the profile has forcing.
class ProfileHasBetaError : public Error {
public:
    using Error::Error;
};

/// Operation requires g0 > 0.
class ZeroInitialNormError : public Error {
public:
    using Error::Error;
};

/// Integrator step size collapsed below 1e-14 * horizon away from a blow-up.
class StepUnderflowError : public Error {
public:
    using Error::Error;
};

/// Decay ratio test inapplicable: gamma vanishes on too much of the tail window.
class GammaVanishesError : public Error {
public:
    using Error::Error;
};

/// Test-system dimension below the minimum of 2.
class DimensionError : public Error {
public:
    using Error::Error;
};

}  // namespace stabcert
