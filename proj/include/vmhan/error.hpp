// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace vmhan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes or feature dimensions do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A hyperedge (or softmax group) has no members.
class InvalidHyperedgeError : public Error {
 public:
  using Error::Error;
};

/// A NaN or infinity appeared where a finite value is required.
class NumericInstabilityError : public Error {
 public:
  using Error::Error;
};

/// Inputs violate a documented precondition (bad label, empty dataset...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class BadMagicError : public ParseError {
 public:
  using ParseError::ParseError;
};

class TruncatedError : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnsupportedVersionError : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace vmhan
