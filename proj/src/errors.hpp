// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace qzeno {

/// Invalid or inconsistent experiment configuration (unknown keys, violated
/// bounds, missing required fields).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation
/// (e.g. a rate-per-interval of one or more).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure at runtime: non-finite amplitudes, quadrature that
/// cannot reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Estimator could not be evaluated (too few points, empty window).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qzeno
