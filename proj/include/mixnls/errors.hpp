#pragma once

#include <stdexcept>
#include <string>

namespace mixnls {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter record or argument violates its precondition.
class InvalidParams : public Error {
public:
    using Error::Error;
};

/// An exponent makes a formula singular (p = 3 in the scaling, s = 1 in omega_s).
class DegenerateExponent : public Error {
public:
    using Error::Error;
};

/// Dense output was requested outside the integrated interval.
class InterpolationOutOfRange : public Error {
public:
    using Error::Error;
};

/// The region carries no theorem statement (vertices, origin, diagonals).
class NoPrediction : public Error {
public:
    using Error::Error;
};

} // namespace mixnls
