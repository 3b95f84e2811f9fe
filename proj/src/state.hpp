// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "rng.hpp"

namespace qzeno {

using complex_t = std::complex<double>;

/// Complex amplitudes over a truncated discrete basis (two-level pair or
/// momentum/action ladder). amplitudes[i] belongs to basis label
/// basis_offset + i.
struct StateVector {
  std::vector<complex_t> amplitudes;
  int basis_offset = 0;

  /// Normalized state with all weight on `label`.
  static StateVector basis_state(int size, int basis_offset, int label);

  std::size_t size() const { return amplitudes.size(); }
  int label_of(std::size_t index) const {
    return basis_offset + static_cast<int>(index);
  }
  bool holds_label(int label) const {
    return label >= basis_offset &&
           label < basis_offset + static_cast<int>(amplitudes.size());
  }
  /// Storage index of a basis label; throws std::out_of_range if absent.
  std::size_t index_of(int label) const;

  double norm() const;  // L2
};

/// Non-negative state populations; entries sum to 1 for a normalized state.
struct ProbabilityDistribution {
  std::vector<double> probabilities;
  int basis_offset = 0;

  double sum() const;
  int label_of(std::size_t index) const {
    return basis_offset + static_cast<int>(index);
  }
};

/// Entry m = |amplitude_m|^2.
ProbabilityDistribution probabilities(const StateVector& state);

/// Phase-randomization measurement: every stored amplitude is multiplied by
/// exp(i 2 pi g) with g uniform in [0, 1), one independent draw per label in
/// ascending label order. Moduli are untouched.
void randomize_phases_all(StateVector& state, RngStream& rng);

/// Same, restricted to the given labels (duplicates ignored; draws are
/// consumed in ascending label order). Throws std::out_of_range for a label
/// outside the stored basis.
void randomize_phases(StateVector& state, const std::vector<int>& measured_labels,
                      RngStream& rng);

/// Projective collapse: samples a basis label distributed per `dist`.
int sample_projection(const ProbabilityDistribution& dist, RngStream& rng);

}  // namespace qzeno
