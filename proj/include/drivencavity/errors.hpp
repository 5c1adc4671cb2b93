#pragma once

#include <stdexcept>
#include <string>

namespace drivencavity {

// All library errors derive from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operator or state dimensions do not match the declared space.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Requested state has non-negligible weight beyond the Fock cutoff.
class TruncationError : public Error {
public:
    using Error::Error;
};

// Integration step too large for the stiffest rate in the problem.
class StepSizeError : public Error {
public:
    using Error::Error;
};

// Semiclassical steady state needs drive > g/2; below that the
// phase equation sin(phi) = g/(2*drive) has no solution.
class WeakDrivingError : public Error {
public:
    using Error::Error;
};

// Conditioning on an emission that has zero probability.
class ZeroAmplitudeError : public Error {
public:
    using Error::Error;
};

// Density matrix fails Hermiticity / unit-trace / positivity checks.
class InvalidDensityMatrix : public Error {
public:
    using Error::Error;
};

// A normalization denominator is too close to zero to divide by.
class NormalizationError : public Error {
public:
    using Error::Error;
};

// Bad or incomplete run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Scalar argument outside the mathematical domain of a formula.
class DomainError : public Error {
public:
    using Error::Error;
};

} // namespace drivencavity
