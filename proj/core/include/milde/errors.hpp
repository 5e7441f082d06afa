#pragma once

#include <stdexcept>
#include <string>

namespace milde {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape/invariant violations: mismatched raster dimensions, malformed matrices.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Unknown identifier (layer id, mask id, instance id).
class LookupError : public Error {
public:
    using Error::Error;
};

/// Caller violated an operation precondition (empty input, out-of-range argument).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A remote backend could not be reached (after the retry budget was spent).
class TransportError : public Error {
public:
    using Error::Error;
};

/// A backend answered, but the response does not parse under the expected grammar.
/// Keeps the raw response so callers can log exactly what the model said.
class ProtocolError : public Error {
public:
    ProtocolError(const std::string& what, std::string raw_response)
        : Error(what), raw_response_(std::move(raw_response)) {}

    const std::string& raw_response() const { return raw_response_; }

private:
    std::string raw_response_;
};

/// Malformed manifest, config or report file.
class ManifestError : public Error {
public:
    using Error::Error;
};

} // namespace milde
