#pragma once

#include <stdexcept>
#include <string>

namespace evogo {

// Error hierarchy shared by all modules. Every failure mode a caller can
// reasonably handle gets its own type; everything else is a logic error.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NotPositiveDefinite : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct EmptySplit : Error {
    using Error::Error;
};

struct TapeMismatch : Error {
    using Error::Error;
};

struct FrozenModelMissing : Error {
    using Error::Error;
};

struct EmptyData : Error {
    using Error::Error;
};

struct SnapshotMissing : Error {
    using Error::Error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

}  // namespace evogo
