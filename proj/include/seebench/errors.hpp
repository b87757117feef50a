#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace seebench {

/// Precondition violated by an argument of a physics or analysis routine.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Unit mismatch or a unit outside the supported set.
class UnitError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UnsupportedVersionError : public ParseError {
public:
    using ParseError::ParseError;
};

class CorruptionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Output sink failed; `position()` is the number of bytes known to be written.
class SinkError : public std::runtime_error {
public:
    SinkError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " (after " + std::to_string(position) + " bytes)"),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Violated internal invariant (non-finite state, broken ordering). Never expected.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace seebench
