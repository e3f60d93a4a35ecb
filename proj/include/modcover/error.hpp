#pragma once

#include <stdexcept>
#include <string>

namespace modcover {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file; the message carries line/field context.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Input violates a documented invariant.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A configured size cap (exact TSP, oracles, glued graph) was exceeded.
class CapExceeded : public Error {
public:
    using Error::Error;
};

/// A run budget deadline passed.
class Timeout : public Error {
public:
    using Error::Error;
};

/// Broken internal contract (scheduling or construction bug).
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace modcover
