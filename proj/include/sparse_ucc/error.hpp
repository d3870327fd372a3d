/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include <stdexcept>
#include <string>

namespace sparse_ucc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (FCIDUMP, AMPJSON, CSV, config).
class ParseError : public Error {
public:
  using Error::Error;
};

/// Index outside its valid range.
class RangeError : public Error {
public:
  using Error::Error;
};

/// Argument violates an operation's precondition.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Input that is well-formed but not handled (open-shell, complex, ...).
class UnsupportedError : public Error {
public:
  using Error::Error;
};

/// Inconsistent run configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Conflicting records in an amplitude file.
class IntegrityError : public Error {
public:
  using Error::Error;
};

/// Amplitude set cannot be mapped onto an operator pool.
class MappingError : public Error {
public:
  using Error::Error;
};

/// Least-squares fit with a rank-deficient design.
class FitError : public Error {
public:
  using Error::Error;
};

/// Orbital-energy denominator too small for perturbation theory.
class DegenerateReferenceError : public Error {
public:
  using Error::Error;
};

/// Filesystem failure.
class IoError : public Error {
public:
  using Error::Error;
};

/// Iterative solver stopped without meeting its tolerance.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

private:
  double residual_;
  int iterations_;
};

} // namespace sparse_ucc
