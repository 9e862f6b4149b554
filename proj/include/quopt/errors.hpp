#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace quopt {

// Base class for all library errors. CLI maps these to exit codes:
// NotPsdError -> 3, everything else -> 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input text (CSV rows, dates, numbers).
struct ParseError : Error {
    using Error::Error;
};

// A value violates a domain invariant (non-positive price, bad rate, ...).
struct DomainError : Error {
    using Error::Error;
};

// Repeated (date, asset) observation in one input.
struct DuplicateError : Error {
    using Error::Error;
};

// Too few observations / too little overlap to proceed.
struct InsufficientDataError : Error {
    using Error::Error;
};

// A statistic cannot be formed (e.g. zero-variance return column).
struct DegenerateInputError : Error {
    using Error::Error;
};

// Basket does not describe a valid delivery choice.
struct InvalidBasketError : Error {
    using Error::Error;
};

// Correlation matrix is not positive definite; `leading_minor` is the
// 1-based order of the first failing leading principal minor.
struct NotPsdError : Error {
    explicit NotPsdError(const std::string& what, std::size_t minor)
        : Error(what), leading_minor(minor) {}
    std::size_t leading_minor;
};

}  // namespace quopt
