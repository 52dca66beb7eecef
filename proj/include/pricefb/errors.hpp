#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pricefb {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Model parameter outside its admissible range.
class ParamError : public Error {
public:
    using Error::Error;
};

/// Grid does not satisfy a structural constraint (a/h integer, resolution, parity).
class GridError : public Error {
public:
    using Error::Error;
};

/// Initial datum violates the (+, 0, -) sign pattern about p0.
class CompatibilityError : public Error {
public:
    using Error::Error;
};

/// Profile handed to the forward transform has more than one sign change
/// or an inverted orientation.
class SignStructureError : public Error {
public:
    using Error::Error;
};

/// Gram matrix of the projection basis lost more rank than the analytic
/// frequency collisions account for, or its condition estimate blew up.
class IllConditionedError : public Error {
public:
    using Error::Error;
};

/// Profile has no sign change: no zero level set inside (-L, L).
class NoSignChangeError : public Error {
public:
    using Error::Error;
};

/// Profile has several zero-level-set brackets; lists their locations.
class MultipleZerosError : public Error {
public:
    MultipleZerosError(const std::string& msg, std::vector<double> bracket_locations)
        : Error(msg), brackets(std::move(bracket_locations)) {}
    std::vector<double> brackets;
};

/// Requested point too close to +-L for the derivative stencil.
class BoundaryError : public Error {
public:
    using Error::Error;
};

/// Time-step matrix factorization failed (broken boundary discretization).
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// Too few usable samples for the decay-rate fit.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Mass ratio admits no steady state with the limit price in [-L+a, L-a].
class NonexistenceError : public Error {
public:
    NonexistenceError(const std::string& msg, double mass_ratio, double lo, double hi)
        : Error(msg), ratio(mass_ratio), interval_lo(lo), interval_hi(hi) {}
    double ratio;
    double interval_lo;
    double interval_hi;
};

/// Malformed run configuration; carries the offending line when known.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg, int line_number = 0)
        : Error(line_number > 0 ? "line " + std::to_string(line_number) + ": " + msg : msg),
          line(line_number) {}
    int line;
};

}  // namespace pricefb
