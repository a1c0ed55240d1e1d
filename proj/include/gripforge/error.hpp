#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gripforge {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// A value lies outside a supported or calibrated range (no extrapolation).
class RangeError : public Error {
public:
    using Error::Error;
};

// Loaded or assembled data violates a structural invariant.
class DataError : public Error {
public:
    using Error::Error;
};

// A statistic cannot be formed because the data carry no variance.
class DegenerateError : public Error {
public:
    using Error::Error;
};

// Malformed text input. line() is 1-based; 0 when unknown.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line),
          detail_(what) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    // Message without the line prefix.
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t line_;
    std::string detail_;
};

enum class DecodeFailure { underflow, resync, corruption };

class DecodeError : public Error {
public:
    DecodeError(DecodeFailure kind, const std::string& what) : Error(what), kind_(kind) {}

    [[nodiscard]] DecodeFailure kind() const noexcept { return kind_; }

private:
    DecodeFailure kind_;
};

}  // namespace gripforge
