// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace isac {

// Invalid or incomplete configuration (CLI exit code 1).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Sample rate too low for the occupied bandwidth.
class SamplingError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// Delay would push the signal past its zero guard.
class TruncationError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Numerical integration or linear-algebra failure (CLI exit code 2).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Scene whose phase information vanishes (F_phiphi <= 0).
class DegenerateSceneError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace isac
