// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0

#include "state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qzeno {

StateVector StateVector::basis_state(int size, int basis_offset, int label) {
  if (size < 2) throw std::invalid_argument("state vector needs at least 2 basis states");
  StateVector s;
  s.amplitudes.assign(static_cast<std::size_t>(size), complex_t(0.0, 0.0));
  s.basis_offset = basis_offset;
  s.amplitudes[s.index_of(label)] = complex_t(1.0, 0.0);
  return s;
}

std::size_t StateVector::index_of(int label) const {
  if (!holds_label(label)) {
    throw std::out_of_range("basis label " + std::to_string(label) +
                            " outside stored range [" + std::to_string(basis_offset) +
                            ", " +
                            std::to_string(basis_offset + static_cast<int>(size()) - 1) +
                            "]");
  }
  return static_cast<std::size_t>(label - basis_offset);
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return std::sqrt(s);
}

double ProbabilityDistribution::sum() const {
  double s = 0.0;
  for (double p : probabilities) s += p;
  return s;
}

ProbabilityDistribution probabilities(const StateVector& state) {
  ProbabilityDistribution d;
  d.basis_offset = state.basis_offset;
  d.probabilities.resize(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    d.probabilities[i] = std::norm(state.amplitudes[i]);
  }
  return d;
}

void randomize_phases_all(StateVector& state, RngStream& rng) {
  for (auto& a : state.amplitudes) {
    const double g = rng.next_double();
    a *= std::polar(1.0, 2.0 * std::numbers::pi * g);
  }
}

void randomize_phases(StateVector& state, const std::vector<int>& measured_labels,
                      RngStream& rng) {
  std::vector<int> labels = measured_labels;
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  for (int label : labels) {
    auto& a = state.amplitudes[state.index_of(label)];
    const double g = rng.next_double();
    a *= std::polar(1.0, 2.0 * std::numbers::pi * g);
  }
}

int sample_projection(const ProbabilityDistribution& dist, RngStream& rng) {
  if (dist.probabilities.empty()) {
    throw std::invalid_argument("cannot sample an empty distribution");
  }
  const double u = rng.next_double();
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.probabilities.size(); ++i) {
    acc += dist.probabilities[i];
    if (u < acc) return dist.label_of(i);
  }
  // Roundoff can leave the cumulative sum a hair under u; fall back to the
  // last label carrying weight.
  for (std::size_t i = dist.probabilities.size(); i-- > 0;) {
    if (dist.probabilities[i] > 0.0) return dist.label_of(i);
  }
  return dist.label_of(dist.probabilities.size() - 1);
}

}  // namespace qzeno
