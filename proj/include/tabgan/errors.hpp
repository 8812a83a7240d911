#pragma once

#include <stdexcept>
#include <string>

namespace tabgan {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Matrix/network dimension mismatches.
struct ShapeError : Error {
    using Error::Error;
};

// Non-finite values where finite math is required.
struct NumericError : Error {
    using Error::Error;
};

// Empty or otherwise unusable arguments.
struct ArgumentError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

// Dataset preparation failures (missing columns, unimputable targets, ...).
struct PrepError : Error {
    using Error::Error;
};

// Operation applied to a column of the wrong kind.
struct TypeError : Error {
    using Error::Error;
};

struct FitError : Error {
    using Error::Error;
};

struct EncodeError : Error {
    using Error::Error;
};

struct DecodeError : Error {
    using Error::Error;
};

struct ScheduleError : Error {
    using Error::Error;
};

// Checkpoint magic/version problems.
struct FormatError : Error {
    using Error::Error;
};

struct EvalError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace tabgan
