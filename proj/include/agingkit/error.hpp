#pragma once

#include <stdexcept>
#include <string>

namespace agingkit {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unreadable input: I/O failures, bad CSV rows, bad tuples,
/// unknown config keys. The CLI maps this to exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

/// A value outside its documented domain, or data that violates an
/// invariant (non-increasing timestamps, degenerate series, ...).
/// The CLI maps this to exit code 3.
class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace agingkit
