#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace contractive {

/// Base of every error raised for invalid input or unmet preconditions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// An operation needs inner-product structure that the active norm lacks.
class UnsupportedStructure : public Error {
public:
    using Error::Error;
};

class EmptySample : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class EvalError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line), column_(column), message_(what) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

/// Raised when one of the library's own invariants fails. Never caused by user input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace contractive
