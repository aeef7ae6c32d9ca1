#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace mfbounds {

// Root of every error thrown by the library. The CLI maps ValidationError to
// exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: a parameter outside its documented range.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Path too short for the requested synthesis method.
class SizeError : public Error {
public:
    using Error::Error;
};

// Scale not commensurate with the sampling grid, or divisibility violated.
class GridError : public Error {
public:
    using Error::Error;
};

// Modified partition function asked for more blocks than the path holds.
class BlockError : public Error {
public:
    using Error::Error;
};

// An increment (or block maximum) too close to zero for a negative moment,
// or a partition value that is not finite and positive.
class DegenerateIncrement : public Error {
public:
    DegenerateIncrement(const std::string& what, std::size_t block)
        : Error(what), block_(block) {}

    std::size_t block() const noexcept { return block_; }

private:
    std::size_t block_;
};

class RegressionError : public Error {
public:
    using Error::Error;
};

// A theorem hypothesis does not hold for the given parameters.
class DomainError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

class LoadError : public Error {
public:
    using Error::Error;
};

}  // namespace mfbounds
