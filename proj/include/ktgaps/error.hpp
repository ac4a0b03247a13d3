#pragma once

#include <stdexcept>
#include <string>

namespace ktgaps {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied value is out of range or malformed.
class InputError : public Error {
public:
    using Error::Error;
};

/// An operation was called with arguments that violate its contract
/// (for example, base primes too small for the requested interval).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A checkpoint file is unreadable, corrupt, or belongs to another scan.
class CheckpointError : public Error {
public:
    using Error::Error;
};

} // namespace ktgaps
