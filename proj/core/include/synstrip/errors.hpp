// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace synstrip {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions do not conform.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value or combination.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Dataset contents violate an invariant (label range, row counts).
class DataError : public Error {
public:
    using Error::Error;
};

/// Missing, truncated or malformed file.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Non-finite value encountered during training.
class NumericError : public Error {
public:
    using Error::Error;
};

/// API called out of order or with out-of-range indices.
class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace synstrip
