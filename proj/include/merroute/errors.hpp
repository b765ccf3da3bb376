#pragma once

#include <stdexcept>
#include <string>

namespace merroute {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input file (JSON scenario, LP/MPS model, solution file).
struct ParseError : Error {
    using Error::Error;
};

/// A scenario or model invariant does not hold; message carries the field path.
struct ValidationError : Error {
    using Error::Error;
};

/// Misuse of the model-building API (duplicate names, empty model, bad refs).
struct ModelError : Error {
    using Error::Error;
};

/// Solver backend unavailable or failed.
struct SolverError : Error {
    using Error::Error;
};

/// Instance exceeds the exact-enumeration size guard.
struct SizeGuardError : Error {
    using Error::Error;
};

}  // namespace merroute
