#pragma once

#include <stdexcept>
#include <string>

namespace zitter {

// Base for every error raised by the library. The CLI maps the subclasses
// onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid input: bad packet, bad trap parameters, malformed config.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Request beyond a fixed capacity (level cap, quadrature order cap).
class CapacityError : public Error {
public:
    using Error::Error;
};

// A numerical result failed its tolerance (truncation tail, quadrature
// convergence, oracle leakage).
class ToleranceError : public Error {
public:
    ToleranceError(const std::string& what, double achieved)
        : Error(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

// Mathematically undefined request, e.g. the singular branch-edge spinor.
class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace zitter
