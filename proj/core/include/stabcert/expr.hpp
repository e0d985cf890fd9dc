#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace stabcert {

enum class InterpOrder { linear, cubic };

namespace detail {
class FunctionImpl;
}

/// A scalar function of time t >= 0, backed by either a parsed expression
/// tree or a tabulated grid with interpolation. Immutable and cheap to copy.
///
/// Expression syntax: infix arithmetic over the variable `t` with the
/// functions exp, log, sin, cos, pow, abs (`^` is accepted as an infix
/// alias for pow). Named profiles resolve to the expressions below:
///
///   sin              sin(t)
///   sin_damped(a)    sin(t) / (1+t)^a
///   const(c)         c
///   exp_decay(k)     exp(-k*t)
///   power_decay(k)   (1+t)^-k
class TimeFunction {
public:
    TimeFunction() = default;

    double operator()(double t) const;

    /// Canonical text form, used in manifests and profile hashes.
    const std::string& source() const;

    bool valid() const noexcept { return impl_ != nullptr; }

    /// Parse a named profile or an expression in t. Throws ParseError.
    static TimeFunction parse(std::string_view text);

    static TimeFunction constant(double c);

    /// Tabulated samples with linear or cubic interpolation. Times must be
    /// strictly increasing; evaluation clamps outside the table range.
    static TimeFunction tabulated(std::vector<double> times,
                                  std::vector<double> values,
                                  InterpOrder order);

private:
    explicit TimeFunction(std::shared_ptr<const detail::FunctionImpl> impl);
    std::shared_ptr<const detail::FunctionImpl> impl_;
};

/// FNV-1a hash of a profile's canonical text, for run manifests.
std::uint64_t source_hash(std::string_view text) noexcept;

}  // namespace stabcert
