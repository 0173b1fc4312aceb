#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specrank {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector length or operator dimension does not match.
class DimensionError : public Error {
public:
    DimensionError(std::size_t expected, std::size_t actual, const std::string& what)
        : Error(what + ": expected length " + std::to_string(expected) + ", got " +
                std::to_string(actual)),
          expected_(expected), actual_(actual) {}

    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

/// A parameter is outside its admissible range.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An iterative kernel failed to converge within its budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Chebyshev recurrence diverged, i.e. the spectrum escaped [-1, 1].
class BlowUpError : public Error {
public:
    using Error::Error;
};

/// Dense oracle refused an input above its size cap.
class CapExceededError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. Carries the 1-based line number (0 when unknown).
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// File could not be opened or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace specrank
