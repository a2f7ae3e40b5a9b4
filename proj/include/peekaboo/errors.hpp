// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace peekaboo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two grids that must agree in shape do not.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A value violates a documented range or invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine produced a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace peekaboo
