#pragma once

#include <stdexcept>
#include <string>

namespace epchain {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or violated preconditions. The CLI maps these to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class DimensionCap : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Numerical failure. The CLI maps these to exit code 3.
class NumericError : public Error {
public:
    using Error::Error;
};

class NonConvergence : public NumericError {
public:
    using NumericError::NumericError;
};

class DefectivePropagation : public NumericError {
public:
    using NumericError::NumericError;
};

class SectorNotInvariant : public NumericError {
public:
    using NumericError::NumericError;
};

class NoRoot : public NumericError {
public:
    using NumericError::NumericError;
};

class NoBracket : public NumericError {
public:
    using NumericError::NumericError;
};

class NoTransition : public NumericError {
public:
    using NumericError::NumericError;
};

class NoDominantState : public NumericError {
public:
    using NumericError::NumericError;
};

class DegenerateFit : public NumericError {
public:
    using NumericError::NumericError;
};

class DegenerateOmega : public NumericError {
public:
    using NumericError::NumericError;
};

class NullSpaceRankError : public NumericError {
public:
    using NumericError::NumericError;
};

/// The closed-form phase boundary disagrees with the diagonalization scan.
/// The CLI maps this to exit code 4.
class ValidationMismatch : public Error {
public:
    using Error::Error;
};

} // namespace epchain
