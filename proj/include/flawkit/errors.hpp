#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flawkit {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input system or configuration (bad probabilities, empty domain, unknown key).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A certification operation was asked of a system that only provides samplers.
class CapabilityError : public Error {
public:
    using Error::Error;
};

/// A configured size limit (states, cycles, horizon) was exceeded.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// An argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Caller violated an operation's precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A checked invariant failed; always a bug in a system or in the library.
class InternalError : public Error {
public:
    using Error::Error;
};

/// Text input could not be parsed. Carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

} // namespace flawkit
