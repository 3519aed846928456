#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mldeg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed polynomial text. `position` is a 0-based byte offset into the input.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Inputs outside an operation's domain (bad dimensions, unknown variables,
/// polynomials that are not valid B/S polynomials, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Tracker configuration that violates its invariants.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An exactness assertion failed; indicates a bug rather than bad input.
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace mldeg
