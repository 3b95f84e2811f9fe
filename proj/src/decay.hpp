// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0
//
// Survival-probability laws for a decaying state under repeated measurement,
// plus the perturbation-theory decay integral over a band of final states.
// Units: hbar = 1.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qzeno {

// Band of decay-product energies [e_lower, e_upper] around the resonance
// e_resonance, with coupling |V(E)|^2 and density of states rho(E). Scalar
// coupling/density means a flat band; tabulated values are interpolated
// linearly and clamped at the band edges.
struct SpectralModel {
  double e_lower = -5.0;
  double e_upper = 5.0;
  double e_resonance = 0.0;

  // Flat-band values, used when the tables below are empty.
  double coupling_sq = 0.01;
  double density = 1.0;

  // Optional tabulated profile: energies must be strictly increasing.
  std::vector<double> table_energy;
  std::vector<double> table_coupling_sq;
  std::vector<double> table_density;

  bool tabulated() const { return !table_energy.empty(); }
  void validate() const;
  double coupling_sq_at(double e) const;
  double density_at(double e) const;
};

struct SurvivalResult {
  double product_law = 0.0;  // (1 - x)^n evaluated stably
  double companion = 0.0;    // exponential comparison value
  bool validity_warning = false;
};

// (1 - gamma*tau)^n with companion exp(-gamma*n*tau). Domain error when
// gamma*tau >= 1; warning flag when gamma*tau > 0.1.
SurvivalResult survival_linear(double gamma, double tau, long n);

// (1 - g*tau^2)^n with companion exp(-g*t^2/n), t = n*tau. Domain error when
// g*tau^2 >= 1; warning flag when g*tau^2 > 0.1.
SurvivalResult survival_quadratic(double g, double tau, long n);

// P_d(t) = integral |V(E)|^2 sin^2((E-E0)t/2) / ((E-E0)/2)^2 rho(E) dE over
// the band. Adaptive quadrature; throws NumericError with the achieved
// tolerance if it fails to converge.
double decay_probability_integral(const SpectralModel& model, double t,
                                  double rel_tol = 1e-9);

// g = (E_u - E_l) |V(E0)|^2 rho(E0), the short-time quadratic coefficient.
double zeno_time_coefficient(const SpectralModel& model);

struct DecayConfig {
  double gamma = 1.0;
  double g = 1.0;
  double tau = 0.01;
  long n_steps = 100;
  SpectralModel model;
  double validity_threshold = 0.1;
  double quadrature_rel_tol = 1e-9;

  void validate() const;
};

struct DecayResult {
  std::vector<double> times;
  std::vector<double> p_decay;
  std::vector<double> p_survival;
  std::vector<double> quadratic_reference;  // g_model * t^2
  double g_model = 0.0;
  SurvivalResult linear;
  SurvivalResult quadratic;
  std::vector<std::string> warnings;
};

DecayResult run_decay(const DecayConfig& config);

}  // namespace qzeno
