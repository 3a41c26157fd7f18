#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace dtebell {

namespace detail {
inline std::string short_number(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}
}  // namespace detail

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An input value lies outside the domain of an operation. `field` names the
// offending parameter.
class DomainError : public Error {
public:
    DomainError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// The pulse does not lift the pair above the guide threshold (p0^2 <= 0).
class BelowThresholdError : public Error {
public:
    explicit BelowThresholdError(double bracket_joule)
        : Error("below-threshold pulse: p0^2/m = " + detail::short_number(bracket_joule) + " J"),
          bracket_(bracket_joule) {}

    double bracket() const noexcept { return bracket_; }

private:
    double bracket_;
};

// Quadrature did not reach the requested accuracy within the node budget.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double estimate)
        : Error(what + " (error estimate " + detail::short_number(estimate) + ")"), estimate_(estimate) {}

    double estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

// Too few kept events to form an estimate.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// Malformed or invalid configuration document.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace dtebell
