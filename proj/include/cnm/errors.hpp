#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cnm {

// Root of every error thrown by the library. Subclasses map onto the CLI's
// exit-code classes (see tools/cnm.cpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dimension or length mismatch between operands.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Input outside an operation's mathematical domain (non-Hermitian matrix,
// non-unit measurement vector, empty window, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Iteration failed to converge or produced a non-finite value.
class NumericError : public Error {
public:
    using Error::Error;
};

// Zero-norm vectors, empty sentences after tokenization.
class DegenerateInputError : public DomainError {
public:
    using DomainError::DomainError;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class ParseError : public DataError {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace cnm
