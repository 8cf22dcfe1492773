#pragma once

#include <stdexcept>
#include <string>

namespace aperiodiq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bad file contents, malformed arguments, mismatched dimensions
struct InputError : Error {
    using Error::Error;
};

// an enumeration or matrix would exceed the configured cap
struct ResourceError : Error {
    using Error::Error;
};

struct UnsupportedError : Error {
    using Error::Error;
};

// a bounded search gave up
struct NoResultError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

// broken invariant; always a bug
struct InternalError : Error {
    using Error::Error;
};

}  // namespace aperiodiq
