#pragma once

#include <stdexcept>
#include <string>

namespace avlag {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed problem files, bad expressions, dimension mismatches.
struct InputError : Error {
    using Error::Error;
};

// An internally derived object failed its own consistency check.
struct VerificationError : Error {
    using Error::Error;
};

} // namespace avlag
