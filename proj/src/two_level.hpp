// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

#include "analysis.hpp"
#include "state.hpp"

namespace qzeno {

using Mat2c = std::array<complex_t, 4>;  // row-major 2x2 complex
using Mat2 = std::array<double, 4>;      // row-major 2x2 real

/// One coherent evolution step of the resonantly driven two-level system
/// over a measurement interval: A = [[cos phi, i sin phi], [i sin phi, cos phi]]
/// with phi = Omega * tau / 2. Unitary.
Mat2c coherent_step_matrix(double phi);

/// A^n in closed form (rotation angle n * phi). Requires n >= 0.
Mat2c coherent_power(double phi, long n);

/// Evolution matrix for the populations when every step ends in a
/// phase-randomizing measurement: M = [[cos^2 phi, sin^2 phi], [sin^2 phi, cos^2 phi]].
/// Doubly stochastic.
Mat2 measured_step_matrix(double phi);

/// M^n in closed form: (1/2) [[1 + c^n, 1 - c^n], [1 - c^n, 1 + c^n]] with
/// c = cos(2 phi). Requires n >= 0.
Mat2 measured_power(double phi, long n);

enum class TwoLevelMode { kAnalytic, kDephasingMc, kCollapseMc };

struct TwoLevelConfig {
  double rabi_frequency = 1.0;        // Omega (1/time), > 0
  double measurement_interval = 0.1;  // tau (time), > 0
  long n_steps = 10;                  // n >= 1
  int initial_state = 0;              // basis label 0 or 1
  TwoLevelMode mode = TwoLevelMode::kAnalytic;
  long n_realizations = 1;            // MC modes only, >= 1

  double phase_per_step() const { return 0.5 * rabi_frequency * measurement_interval; }
  void validate() const;  // throws ConfigError
};

/// Populations p1(k tau), p2(k tau) for k = 0..n with the (n-1) intermediate
/// measurements. Analytic mode evaluates the closed form; the MC modes
/// average trajectories (phase randomization or full collapse after each
/// intermediate step) over n_realizations per-realization RNG streams.
EnsembleResult run_two_level(const TwoLevelConfig& config, std::uint64_t master_seed,
                             int n_threads = 1);

}  // namespace qzeno
