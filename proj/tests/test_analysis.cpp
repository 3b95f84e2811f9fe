// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <doctest.h>

#include "analysis.hpp"
#include "errors.hpp"
#include "oracles.hpp"

using namespace qzeno;

namespace {

EnsembleResult linear_energy_series(std::size_t n_points, double tau, double slope,
                                    double intercept = 0.0) {
  EnsembleResult r;
  for (std::size_t j = 0; j < n_points; ++j) {
    const double t = tau * static_cast<double>(j);
    r.times.push_back(t);
    r.energy_mean.push_back(intercept + slope * t);
    r.energy_err.push_back(0.0);
  }
  return r;
}

ProbabilityDistribution exponential_profile(int half, double lambda, int m0 = 0) {
  ProbabilityDistribution d;
  d.basis_offset = m0 - half;
  double norm = 0.0;
  for (int m = -half; m <= half; ++m)
    norm += std::exp(-2.0 * std::fabs(static_cast<double>(m)) / lambda);
  for (int m = -half; m <= half; ++m)
    d.probabilities.push_back(
        std::exp(-2.0 * std::fabs(static_cast<double>(m)) / lambda) / norm);
  return d;
}

}  // namespace

TEST_CASE("diffusion fit recovers the slope of a clean line") {
  const EnsembleResult r = linear_energy_series(41, 1.0, 25.0);
  const FitResult fit = diffusion_fit(r, 1.0);
  CHECK(std::fabs(fit.estimate - 12.5) < 1e-9);  // B = slope / 2
  CHECK(fit.std_error < 1e-9);
  CHECK(fit.goodness == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(!fit.flagged);
  CHECK(fit.window_begin == 3);  // t=0 plus the first 2 kicks excluded
  CHECK(fit.window_end == 41);
}

TEST_CASE("diffusion fit on the squared-kernel walk recovers k^2/4tau") {
  const oracle::WalkOracle walk = oracle::j2_walk(5.0, 40);
  EnsembleResult r;
  for (std::size_t j = 0; j < walk.energies.size(); ++j) {
    r.times.push_back(static_cast<double>(j));
    r.energy_mean.push_back(walk.energies[j]);
    r.energy_err.push_back(0.0);
  }
  const FitResult fit = diffusion_fit(r, 1.0);
  CHECK(std::fabs(fit.estimate - 6.25) < 0.01 * 6.25);
}

TEST_CASE("diffusion fit needs enough points") {
  const EnsembleResult r = linear_energy_series(12, 1.0, 2.0);
  CHECK_THROWS_AS(diffusion_fit(r, 1.0), FitError);
  const EnsembleResult ok = linear_energy_series(13, 1.0, 2.0);
  CHECK_NOTHROW(diffusion_fit(ok, 1.0));
}

TEST_CASE("diffusion fit uses errors as weights when all are positive") {
  EnsembleResult r = linear_energy_series(30, 1.0, 10.0);
  for (std::size_t j = 0; j < r.energy_err.size(); ++j)
    r.energy_err[j] = 0.5 + 0.01 * static_cast<double>(j);
  r.energy_mean[10] += 0.3;  // small outlier, fit should still be close
  const FitResult fit = diffusion_fit(r, 1.0);
  CHECK(std::fabs(fit.estimate - 5.0) < 0.01);
  CHECK(fit.std_error > 0.0);
}

TEST_CASE("localization fit recovers lambda of an exponential profile") {
  const ProbabilityDistribution d = exponential_profile(200, 10.0);
  const FitResult fit = localization_fit(d, 0);
  CHECK(!fit.flagged);
  CHECK(std::fabs(fit.estimate - 10.0) < 0.01);
  CHECK(fit.goodness > 0.999);
}

TEST_CASE("localization fit is invariant under relabeling") {
  const ProbabilityDistribution a = exponential_profile(150, 8.0, 0);
  const ProbabilityDistribution b = exponential_profile(150, 8.0, 37);
  const FitResult fa = localization_fit(a, 0);
  const FitResult fb = localization_fit(b, 37);
  CHECK(fa.estimate == fb.estimate);
  CHECK(fa.goodness == fb.goodness);
  CHECK(fa.flagged == fb.flagged);
}

TEST_CASE("localization fit flags a flat profile") {
  ProbabilityDistribution d;
  d.basis_offset = -100;
  d.probabilities.assign(201, 1.0 / 201.0);
  const FitResult fit = localization_fit(d, 0);
  CHECK(fit.flagged);
  CHECK(!fit.flag_reason.empty());
}

TEST_CASE("localization fit flags a profile with too few tail bins") {
  const ProbabilityDistribution d = exponential_profile(15, 5.0);
  const FitResult fit = localization_fit(d, 0);
  CHECK(fit.flagged);
  CHECK(fit.flag_reason.find("tail bins") != std::string::npos);
}

TEST_CASE("localization fit honors the probability floor") {
  ProbabilityDistribution d = exponential_profile(200, 10.0);
  // bury the far tail under a noise floor
  for (std::size_t i = 0; i < d.probabilities.size(); ++i) {
    const int m = d.label_of(i);
    if (std::abs(m) > 120) d.probabilities[i] = 1e-30;
  }
  LocalizationFitOptions opts;
  opts.floor = 1e-25;
  const FitResult fit = localization_fit(d, 0, opts);
  CHECK(!fit.flagged);
  CHECK(std::fabs(fit.estimate - 10.0) < 0.05);
}

TEST_CASE("break time estimate finds the synthetic crossing at 20") {
  // energy follows 2 B t then freezes at 20 B: threshold crossing at t = 20
  const double b = 3.0;
  EnsembleResult r;
  for (int j = 0; j <= 60; ++j) {
    const double t = static_cast<double>(j);
    r.times.push_back(t);
    r.energy_mean.push_back(std::min(2.0 * b * t, 20.0 * b));
    r.energy_err.push_back(0.0);
  }
  const FitResult fit = break_time_estimate(r, b);
  CHECK(!fit.flagged);
  CHECK(std::fabs(fit.estimate - 20.0) < 1e-9);
}

TEST_CASE("break time threshold is configurable") {
  const double b = 1.0;
  EnsembleResult r;
  for (int j = 0; j <= 100; ++j) {
    const double t = static_cast<double>(j);
    r.times.push_back(t);
    r.energy_mean.push_back(std::min(2.0 * b * t, 20.0 * b));
    r.energy_err.push_back(0.0);
  }
  BreakTimeOptions opts;
  opts.threshold = 0.25;
  const FitResult fit = break_time_estimate(r, b, opts);
  CHECK(!fit.flagged);
  CHECK(std::fabs(fit.estimate - 40.0) < 1e-9);
}

TEST_CASE("break time flags pure diffusion") {
  const EnsembleResult r = linear_energy_series(50, 1.0, 2.0);
  const FitResult fit = break_time_estimate(r, 1.0);
  CHECK(fit.flagged);
  CHECK(fit.flag_reason.find("saturat") != std::string::npos);
}

TEST_CASE("break time requires growth and enough samples") {
  EnsembleResult r = linear_energy_series(5, 1.0, 2.0);
  CHECK_THROWS_AS(break_time_estimate(r, 1.0), FitError);
  r = linear_energy_series(50, 1.0, 2.0);
  CHECK_THROWS_AS(break_time_estimate(r, 0.0), FitError);
  // flat series: no initial growth
  EnsembleResult flat = linear_energy_series(50, 1.0, 0.0, 5.0);
  const FitResult fit = break_time_estimate(flat, 1.0);
  CHECK(fit.flagged);
}
