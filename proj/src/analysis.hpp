// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "state.hpp"

namespace qzeno {

/// Per-time-step observables aggregated over stochastic realizations.
/// Standard errors are sample std / sqrt(n_realizations) and are exactly
/// zero when n_realizations == 1. Which series are populated depends on the
/// engine that produced the result (populations for the two-level system,
/// energy/participation/leakage plus profiles for the kicked rotor).
struct EnsembleResult {
  std::vector<double> times;

  // two-level populations
  std::vector<double> p1_mean, p1_err;
  std::vector<double> p2_mean, p2_err;

  // rotor observables
  std::vector<double> energy_mean, energy_err;  // <(m - m0)^2>
  std::vector<double> participation_mean, participation_err;
  std::vector<double> leakage_mean;  // probability in the outer 5% of the basis

  ProbabilityDistribution final_profile;  // ensemble mean at the last kick
  ProbabilityDistribution tail_profile;   // time-average over the last quarter of kicks

  long n_realizations = 1;
  double leakage_max = 0.0;
  int initial_label = 0;
  std::vector<std::string> warnings;
};

struct FitResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t window_begin = 0, window_end = 0;  // [begin, end) sample indices
  double goodness = 0.0;                         // R^2 where meaningful
  bool flagged = false;
  std::string flag_reason;
};

/// Weighted linear fit of <(m-m0)^2> against time over the linear-growth
/// window (the first 2 kicks are excluded). Returns B = slope / 2, i.e. the
/// diffusion coefficient in the convention B = <(Delta m)^2> / (2 t).
/// Throws FitError when fewer than 10 points remain in the window.
FitResult diffusion_fit(const EnsembleResult& result, double tau);

struct LocalizationFitOptions {
  double central_exclusion = 0.2;        // fraction of the usable extent dropped around m0
  double floor = 0.0;                    // bins with P < floor are unusable
  double r2_floor = 0.8;                 // below this the result is flagged
  std::size_t min_tail_bins_per_side = 20;
};

/// Fits P_m ~ exp(-2|m - m0| / lambda) on the profile tails (weighted least
/// squares of ln P against |m - m0|, weights P_m). A non-exponential profile
/// is returned flagged, not thrown.
FitResult localization_fit(const ProbabilityDistribution& profile, int m0,
                           const LocalizationFitOptions& options = {});

struct BreakTimeOptions {
  double threshold = 0.5;         // fraction of the classical prediction
  double saturation_ratio = 0.2;  // final-quarter slope must drop below this times the initial slope
};

/// First time at which the running energy falls below threshold times the
/// classical-diffusion prediction 2 * b_classical * t. Flagged when the
/// curve never saturates or never crosses.
FitResult break_time_estimate(const EnsembleResult& result, double b_classical,
                              const BreakTimeOptions& options = {});

}  // namespace qzeno
