#pragma once

#include <stdexcept>
#include <string>

namespace cwseed {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rectilinear, parabolic or hyperbolic state where an ellipse was required.
class DegenerateOrbit : public Error {
public:
    using Error::Error;
};

/// Kepler's equation failed to converge (unreachable for 0 <= e < 1).
class NonConvergence : public Error {
public:
    using Error::Error;
};

/// Two-body integration passed too close to the central body.
class SingularRadius : public Error {
public:
    using Error::Error;
};

/// Trajectory samples are too sparse to unwrap the orbital angle.
class InsufficientSampling : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or control file.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed input that violates the schema or a domain invariant.
class ValidationError : public Error {
public:
    ValidationError(std::string key, const std::string& what)
        : Error(key + ": " + what), key_(std::move(key)), detail_(what) {}

    const std::string& key() const noexcept { return key_; }
    /// Message without the key prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string key_;
    std::string detail_;
};

}  // namespace cwseed
