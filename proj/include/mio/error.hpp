// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mio {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mismatched vector/matrix shapes.
struct DimensionError : Error {
  using Error::Error;
};

// Input outside an operation's mathematical domain.
struct DomainError : Error {
  using Error::Error;
};

// Malformed external data (files, records, streams).
struct FormatError : Error {
  using Error::Error;
};

// Invalid or inconsistent configuration.
struct ConfigError : Error {
  using Error::Error;
};

// Operation not defined for the requested configuration.
struct UnsupportedError : Error {
  using Error::Error;
};

// Training produced non-finite or degenerate state.
struct DivergenceError : Error {
  using Error::Error;
};

// Finite-difference audit could not complete (non-finite loss).
struct AuditError : Error {
  using Error::Error;
};

}  // namespace mio
