#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stacksr {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Token id outside the primitive set.
class InvalidTokenError : public Error {
public:
    using Error::Error;
};

// Caller supplied an out-of-range or inconsistent parameter.
class ParameterError : public Error {
public:
    using Error::Error;
};

// No genome of the requested length can be built from the primitive set.
class InfeasiblePrimitiveSetError : public Error {
public:
    using Error::Error;
};

class InvalidGenomeError : public Error {
public:
    using Error::Error;
};

// Operation requires state that has not been established (e.g. unset fitness).
class StateError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : Error(what), row_(row), column_(column)
    {
    }

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

// Well-formed input that cannot be used: ragged rows, too few rows, bad arity.
class DataError : public Error {
public:
    using Error::Error;
};

class CorruptFileError : public Error {
public:
    using Error::Error;
};

} // namespace stacksr
