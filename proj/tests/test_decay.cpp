// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstddef>
#include <vector>

#include <doctest.h>

#include "decay.hpp"
#include "errors.hpp"
#include "oracles.hpp"

using namespace qzeno;

namespace {

SpectralModel flat_model() {
  SpectralModel m;
  m.e_lower = -5.0;
  m.e_upper = 5.0;
  m.e_resonance = 0.0;
  m.coupling_sq = 0.01;
  m.density = 1.0;
  return m;
}

double band_integrand(const SpectralModel& m, double e, double t) {
  const double half = 0.5 * (e - m.e_resonance);
  const double s = (std::fabs(half) < 1e-12) ? t : std::sin(half * t) / half;
  return m.coupling_sq_at(e) * m.density_at(e) * s * s;
}

}  // namespace

TEST_CASE("linear survival law and its exponential companion") {
  const SurvivalResult r = survival_linear(0.01, 1.0, 100);
  CHECK(std::fabs(r.product_law - oracle::kSurvival099Pow100) < 1e-15);
  CHECK(std::fabs(r.companion - oracle::kExpMinus1) < 1e-15);
  CHECK(!r.validity_warning);
}

TEST_CASE("linear survival approaches the exponential as steps shrink") {
  double prev_gap = 1.0;
  for (long n : {10L, 100L, 1000L, 10000L, 1000000L}) {
    const SurvivalResult r = survival_linear(1.0, 1.0 / static_cast<double>(n), n);
    const double gap = std::fabs(r.product_law - oracle::kExpMinus1);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 1e-5);  // n = 1e6
}

TEST_CASE("linear survival edge cases") {
  CHECK(survival_linear(0.0, 1.0, 50).product_law == 1.0);
  CHECK(survival_linear(0.5, 0.4, 3).validity_warning);  // gamma tau = 0.2
  CHECK_THROWS_AS(survival_linear(1.0, 1.0, 2), DomainError);
  CHECK_THROWS_AS(survival_linear(2.0, 1.0, 2), DomainError);
}

TEST_CASE("quadratic survival law") {
  const SurvivalResult r = survival_quadratic(1.0, 1e-2, 100);
  CHECK(std::fabs(r.product_law - oracle::kSurvivalQuad100) < 1e-15);
  CHECK(std::fabs(r.companion - oracle::kExpMinus001) < 1e-15);
}

TEST_CASE("quadratic survival approaches one as measurements accelerate") {
  // total time fixed at 1, g = 1
  double prev = 0.0;
  for (long n : {100L, 1000L, 10000L, 100000L}) {
    const SurvivalResult r = survival_quadratic(1.0, 1.0 / static_cast<double>(n), n);
    CHECK(r.product_law >= 1.0 - 1.01 / static_cast<double>(n));
    CHECK(r.product_law > prev);
    prev = r.product_law;
  }
  CHECK(survival_quadratic(0.0, 0.1, 10).product_law == 1.0);
  CHECK_THROWS_AS(survival_quadratic(1.0, 1.5, 2), DomainError);
}

TEST_CASE("zeno time coefficient of the flat band") {
  CHECK(zeno_time_coefficient(flat_model()) == doctest::Approx(0.1).epsilon(1e-15));
  SpectralModel dense = flat_model();
  dense.density = 2.0;
  CHECK(zeno_time_coefficient(dense) == doctest::Approx(0.2).epsilon(1e-15));
  SpectralModel uncoupled = flat_model();
  uncoupled.coupling_sq = 0.0;
  CHECK(zeno_time_coefficient(uncoupled) == 0.0);
}

TEST_CASE("decay integral matches the frozen flat-band values") {
  const SpectralModel m = flat_model();
  CHECK(decay_probability_integral(m, 0.0) == 0.0);
  struct Pin {
    double t, value;
  };
  const Pin pins[] = {{1e-3, oracle::kPdFlat1em3}, {3e-3, oracle::kPdFlat3em3},
                      {5e-3, oracle::kPdFlat5em3}, {1e-2, oracle::kPdFlat1em2},
                      {0.1, oracle::kPdFlat1em1},  {1.0, oracle::kPdFlat1},
                      {5.0, oracle::kPdFlat5}};
  for (const Pin& p : pins) {
    const double got = decay_probability_integral(m, p.t);
    CHECK(std::fabs(got - p.value) <= 1e-8 * p.value);
  }
}

TEST_CASE("decay integral agrees with an independent quadrature") {
  const SpectralModel m = flat_model();
  for (double t : {0.02, 0.3, 2.0, 7.7}) {
    const double ref = oracle::integrate(
        [&](double e) { return band_integrand(m, e, t); }, m.e_lower, m.e_upper,
        200);
    const double got = decay_probability_integral(m, t);
    CHECK(std::fabs(got - ref) <= 1e-9 * std::fabs(ref));
  }
}

TEST_CASE("halving the tolerance moves the integral less than the tolerance") {
  const SpectralModel m = flat_model();
  for (double t : {0.5, 2.0}) {
    const double coarse = decay_probability_integral(m, t, 1e-9);
    const double fine = decay_probability_integral(m, t, 5e-10);
    CHECK(std::fabs(coarse - fine) <= 1e-9 * std::fabs(coarse));
  }
}

TEST_CASE("short-time window is quadratic within two percent") {
  const SpectralModel m = flat_model();
  const double g = zeno_time_coefficient(m);
  // t * bandwidth in [0.01, 0.1]
  for (double t : {0.001, 0.002, 0.005, 0.01}) {
    const double pd = decay_probability_integral(m, t);
    CHECK(std::fabs(pd - g * t * t) <= 0.02 * g * t * t);
  }
}

TEST_CASE("tabulated model reproduces the flat band") {
  SpectralModel m = flat_model();
  m.table_energy = {-5.0, 5.0};
  m.table_coupling_sq = {0.01, 0.01};
  m.table_density = {1.0, 1.0};
  REQUIRE(m.tabulated());
  CHECK(m.coupling_sq_at(0.3) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(m.density_at(-4.9) == doctest::Approx(1.0).epsilon(1e-15));
  const double flat = decay_probability_integral(flat_model(), 0.7);
  const double tab = decay_probability_integral(m, 0.7);
  CHECK(std::fabs(flat - tab) <= 1e-12 * flat);
}

TEST_CASE("tabulated model interpolates linearly and clamps") {
  SpectralModel m;
  m.e_lower = -2.0;
  m.e_upper = 2.0;
  m.e_resonance = 0.0;
  m.table_energy = {-2.0, 0.0, 2.0};
  m.table_coupling_sq = {0.00, 0.02, 0.04};
  m.table_density = {1.0, 2.0, 1.0};
  CHECK(m.coupling_sq_at(-1.0) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(m.coupling_sq_at(1.0) == doctest::Approx(0.03).epsilon(1e-14));
  CHECK(m.density_at(-1.0) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(m.coupling_sq_at(-3.0) == doctest::Approx(0.0).epsilon(1e-14));  // clamped
  CHECK(m.coupling_sq_at(3.0) == doctest::Approx(0.04).epsilon(1e-14));
  const double t = 1.3;
  const double ref = oracle::integrate(
      [&](double e) { return band_integrand(m, e, t); }, m.e_lower, m.e_upper, 200);
  const double got = decay_probability_integral(m, t);
  CHECK(std::fabs(got - ref) <= 1e-8 * std::fabs(ref));
}

TEST_CASE("spectral model validation") {
  SpectralModel m = flat_model();
  m.e_lower = 5.0;
  m.e_upper = -5.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = flat_model();
  m.coupling_sq = -0.1;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = flat_model();
  m.e_resonance = 9.0;  // outside the band
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = flat_model();
  m.table_energy = {0.0, -1.0};  // not increasing
  m.table_coupling_sq = {0.01, 0.01};
  m.table_density = {1.0, 1.0};
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = flat_model();
  m.table_energy = {0.0, 1.0};
  m.table_coupling_sq = {0.01};  // length mismatch
  m.table_density = {1.0, 1.0};
  CHECK_THROWS_AS(m.validate(), ConfigError);
}

TEST_CASE("unreachable tolerance raises a numeric error with diagnostics") {
  CHECK_THROWS_AS(decay_probability_integral(flat_model(), 3.0, 1e-18), NumericError);
  try {
    decay_probability_integral(flat_model(), 3.0, 1e-18);
  } catch (const NumericError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("tolerance") != std::string::npos);
  }
}

TEST_CASE("run_decay assembles a consistent time series") {
  DecayConfig config;
  config.gamma = 0.05;
  config.g = 0.1;
  config.tau = 0.01;
  config.n_steps = 20;
  config.model = flat_model();
  const DecayResult r = run_decay(config);
  REQUIRE(r.times.size() == 21);
  REQUIRE(r.p_decay.size() == 21);
  CHECK(r.times[0] == 0.0);
  CHECK(r.p_decay[0] == 0.0);
  CHECK(r.p_survival[0] == 1.0);
  CHECK(r.g_model == doctest::Approx(0.1).epsilon(1e-15));
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    CHECK(r.p_survival[i] == doctest::Approx(1.0 - r.p_decay[i]).epsilon(1e-14));
    const double t = r.times[i];
    CHECK(r.quadratic_reference[i] ==
          doctest::Approx(r.g_model * t * t).epsilon(1e-14));
    CHECK(r.p_decay[i] >= 0.0);
    CHECK(r.p_decay[i] <= 1.0);
  }
  // monotone in t for the flat band over this range
  for (std::size_t i = 1; i < r.times.size(); ++i)
    CHECK(r.p_decay[i] > r.p_decay[i - 1]);
  CHECK(r.warnings.empty());
}

TEST_CASE("run_decay surfaces validity warnings") {
  DecayConfig config;
  config.gamma = 30.0;  // gamma tau = 0.3 > 0.1
  config.tau = 0.01;
  config.n_steps = 5;
  config.model = flat_model();
  const DecayResult r = run_decay(config);
  CHECK(r.linear.validity_warning);
  CHECK(!r.warnings.empty());
}

TEST_CASE("run_decay rejects a certain-death step") {
  DecayConfig config;
  config.gamma = 150.0;
  config.tau = 0.01;  // gamma tau = 1.5
  config.model = flat_model();
  CHECK_THROWS_AS(run_decay(config), DomainError);
}

TEST_CASE("decay config validation") {
  DecayConfig config;
  config.tau = 0.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = {};
  config.n_steps = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = {};
  config.gamma = -1.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = {};
  config.quadrature_rel_tol = 0.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
}
