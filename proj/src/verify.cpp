// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0

#include "verify.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <sstream>

#include "analysis.hpp"
#include "bessel.hpp"
#include "decay.hpp"
#include "errors.hpp"
#include "rotor.hpp"
#include "state.hpp"
#include "two_level.hpp"

namespace qzeno {

namespace {

// fn returns "" to pass, otherwise the failure detail.
void run_check(VerifyReport& report, const std::string& name,
               const std::function<std::string()>& fn) {
  VerifyCheck check;
  check.name = name;
  const auto start = std::chrono::steady_clock::now();
  try {
    check.detail = fn();
    check.passed = check.detail.empty();
  } catch (const std::exception& e) {
    check.passed = false;
    check.detail = std::string("exception: ") + e.what();
  }
  check.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.checks.push_back(std::move(check));
}

std::string expect_close(double actual, double expected, double tol, const char* what) {
  if (std::fabs(actual - expected) <= tol) return "";
  std::ostringstream os;
  os << what << ": got " << actual << ", want " << expected << " +- " << tol;
  return os.str();
}

Mat2 mat2_mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

std::string check_two_level_closed_form() {
  for (long n = 1; n <= 64; ++n) {
    const double phi = M_PI / (2.0 * static_cast<double>(n));
    Mat2 acc{1.0, 0.0, 0.0, 1.0};
    const Mat2 step = measured_step_matrix(phi);
    for (long i = 0; i < n; ++i) acc = mat2_mul(step, acc);
    const Mat2 closed = measured_power(phi, n);
    for (int e = 0; e < 4; ++e) {
      if (std::fabs(acc[e] - closed[e]) > 1e-10) {
        std::ostringstream os;
        os << "n=" << n << " entry " << e << ": repeated product " << acc[e]
           << " vs closed form " << closed[e];
        return os.str();
      }
    }
  }
  return "";
}

std::string check_certain_transition() {
  // Unmeasured drive with total angle pi/2 moves all population across.
  for (long n : {1L, 7L, 128L}) {
    const double phi = M_PI / (2.0 * static_cast<double>(n));
    const Mat2c amp = coherent_power(phi, n);
    const double p2 = std::norm(amp[2]);
    if (std::fabs(p2 - 1.0) > 1e-12) {
      std::ostringstream os;
      os << "n=" << n << ": coherent p2 = " << p2 << ", want 1 within 1e-12";
      return os.str();
    }
  }
  return "";
}

std::string check_zeno_inhibition() {
  // pow(cos 2phi, n) amplifies the base rounding by n, so the pins allow
  // a few hundred ulp.
  const Mat2 m100 = measured_power(M_PI / 200.0, 100);
  std::string r =
      expect_close(m100[2], 0.024078960601111223, 1e-12, "measured p2 at n=100");
  if (!r.empty()) return r;
  const Mat2 m1000 = measured_power(M_PI / 2000.0, 1000);
  r = expect_close(m1000[2], 0.0024613270729539428, 1e-12, "measured p2 at n=1000");
  if (!r.empty()) return r;
  if (!(m1000[2] < m100[2])) return "survival inhibition not monotone in n";
  return "";
}

std::string check_survival_linear() {
  const SurvivalResult r = survival_linear(1.0, 0.01, 100);
  std::string e = expect_close(r.product_law, 0.36603234127322950, 1e-15,
                               "(1-0.01)^100");
  if (!e.empty()) return e;
  e = expect_close(r.companion, 0.36787944117144233, 1e-15, "exp(-1)");
  if (!e.empty()) return e;
  const SurvivalResult big = survival_linear(1.0, 1e-6, 1000000);
  if (std::fabs(big.product_law - std::exp(-1.0)) >= 1e-5)
    return "n=1e6 product law is not within 1e-5 of exp(-1)";
  const SurvivalResult mid = survival_linear(1.0, 1e-3, 1000);
  if (!(std::fabs(big.product_law - std::exp(-1.0)) <
        std::fabs(mid.product_law - std::exp(-1.0))))
    return "convergence to the exponential law is not improving with n";
  return "";
}

std::string check_survival_quadratic() {
  const SurvivalResult r = survival_quadratic(1.0, 0.01, 100);
  std::string e =
      expect_close(r.product_law, 0.99004933869137082, 1e-15, "(1-1e-4)^100");
  if (!e.empty()) return e;
  for (long n : {100L, 1000L, 10000L}) {
    const double tau = 1.0 / static_cast<double>(n);  // fixed t = 1
    const SurvivalResult s = survival_quadratic(1.0, tau, n);
    if (!(s.product_law >= 1.0 - 1.01 / static_cast<double>(n))) {
      std::ostringstream os;
      os << "survival " << s.product_law << " at n=" << n << " below 1 - 1.01/n";
      return os.str();
    }
  }
  return "";
}

std::string check_bessel() {
  std::string e = expect_close(bessel_j(1, 5.0), -0.32757913759146522, 5e-15, "J1(5)");
  if (!e.empty()) return e;
  const auto kernel = bessel_kernel(5.0, bessel_default_half_width(5.0));
  double norm = 0.0, second = 0.0;
  const int w = (static_cast<int>(kernel.size()) - 1) / 2;
  for (int m = -w; m <= w; ++m) {
    const double j = kernel[static_cast<std::size_t>(m + w)];
    norm += j * j;
    second += static_cast<double>(m) * static_cast<double>(m) * j * j;
  }
  e = expect_close(norm, 1.0, 1e-12, "sum J_m^2(5)");
  if (!e.empty()) return e;
  e = expect_close(second, 12.5, 1e-10, "sum m^2 J_m^2(5)");
  if (!e.empty()) return e;
  for (int m = 1; m <= w; ++m) {
    const double jnieg = kernel[static_cast<std::size_t>(w - m)];
    const double jpos = kernel[static_cast<std::size_t>(w + m)];
    if (jnieg != (m % 2 == 0 ? jpos : -jpos)) return "J_{-m} symmetry violated";
  }
  return "";
}

StateVector random_state(int n, int offset, RngStream& rng) {
  StateVector s;
  s.basis_offset = offset;
  s.amplitudes.resize(static_cast<std::size_t>(n));
  double norm_sq = 0.0;
  for (auto& a : s.amplitudes) {
    a = complex_t(rng.next_double() - 0.5, rng.next_double() - 0.5);
    norm_sq += std::norm(a);
  }
  const double scale = 1.0 / std::sqrt(norm_sq);
  for (auto& a : s.amplitudes) a *= scale;
  return s;
}

std::string check_kernel_equivalence() {
  const int n = 257;
  const int offset = -128;
  RngStream rng(0xC0FFEEULL, 7);
  std::vector<complex_t> scratch;
  for (double k : {2.0, 5.0, 10.0}) {
    SpectralKicker spectral(n, offset, k);
    const auto kernel = bessel_kernel(k, std::min(bessel_default_half_width(k), (n - 1) / 2));
    for (int trial = 0; trial < 7; ++trial) {
      StateVector s = random_state(n, offset, rng);
      std::vector<complex_t> direct = s.amplitudes;
      kick_bessel_direct(direct, kernel, scratch);
      spectral.apply(s.amplitudes);
      for (std::size_t i = 0; i < s.amplitudes.size(); ++i) {
        if (std::abs(s.amplitudes[i] - direct[i]) > 1e-10) {
          std::ostringstream os;
          os << "k=" << k << " entry " << i << ": |spectral - direct| = "
             << std::abs(s.amplitudes[i] - direct[i]);
          return os.str();
        }
      }
    }
  }
  return "";
}

std::string check_first_step_exactness() {
  RotorConfig config;
  config.kick_strength = 5.0;
  config.n_kicks = 1;
  config.basis_size = 257;
  config.basis_override = true;
  config.schedule.every_n_kicks = 1;
  config.kernel = KickKernel::kSpectral;
  RotorEngine engine(config);
  RotorWorkspace ws(engine);
  RngStream rng(11, 0);
  StateVector s = engine.make_initial_state();
  engine.step(s, 1, rng, ws);
  const auto kernel = bessel_kernel(5.0, (engine.basis_size() - 1) / 2);
  const int w = (static_cast<int>(kernel.size()) - 1) / 2;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const int d = s.label_of(i) - config.initial_state;
    const double expected =
        std::abs(d) <= w ? kernel[static_cast<std::size_t>(w + d)] : 0.0;
    if (std::fabs(std::norm(s.amplitudes[i]) - expected * expected) > 1e-12) {
      std::ostringstream os;
      os << "P(m0+" << d << ") = " << std::norm(s.amplitudes[i]) << ", want J^2 = "
         << expected * expected;
      return os.str();
    }
  }
  return "";
}

std::string check_unitarity() {
  RotorConfig config;
  config.kick_strength = 5.0;
  config.n_kicks = 100;
  config.basis_size = 257;
  config.basis_override = true;
  config.schedule.every_n_kicks = 1;
  RotorEngine engine(config);
  RotorWorkspace ws(engine);
  RngStream rng(3, 0);
  StateVector s = engine.make_initial_state();
  double prev = 1.0;
  for (long j = 1; j <= config.n_kicks; ++j) {
    engine.step(s, j, rng, ws);
    const double nrm = s.norm();
    if (std::fabs(nrm - prev) > 1e-10) return "per-step norm drift above 1e-10";
    prev = nrm;
  }
  if (std::fabs(prev - 1.0) > 1e-8) return "cumulative norm drift above 1e-8";
  return "";
}

std::string check_free_rotation_resonance() {
  RngStream rng(5, 5);
  StateVector s = random_state(101, -50, rng);
  const StateVector before = s;
  free_rotation(s, {0.0, 0.0, 0.5}, 4.0 * M_PI);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(s.amplitudes[i] - before.amplitudes[i]) > 1e-9) {
      std::ostringstream os;
      os << "tau=4pi free rotation is not the identity at m=" << s.label_of(i);
      return os.str();
    }
  }
  return "";
}

std::string check_decay_integral() {
  SpectralModel model;  // flat, |V|^2 = 0.01, rho = 1, band [-5, 5]
  std::string e = expect_close(zeno_time_coefficient(model), 0.1, 1e-15, "g");
  if (!e.empty()) return e;
  e = expect_close(decay_probability_integral(model, 0.01), 9.999305590276670588e-6,
                   1e-12, "P_d(0.01)");
  if (!e.empty()) return e;
  e = expect_close(decay_probability_integral(model, 1.0), 0.056266547281492775607,
                   1e-10, "P_d(1)");
  if (!e.empty()) return e;
  if (decay_probability_integral(model, 0.0) != 0.0) return "P_d(0) != 0";
  return "";
}

std::string check_quadratic_window() {
  SpectralModel model;
  const double g = zeno_time_coefficient(model);
  for (double t : {0.001, 0.002, 0.005, 0.01}) {
    const double pd = decay_probability_integral(model, t);
    const double ratio = pd / (g * t * t);
    if (std::fabs(ratio - 1.0) > 0.02) {
      std::ostringstream os;
      os << "P_d/(g t^2) = " << ratio << " at t=" << t << ", outside 2%";
      return os.str();
    }
  }
  return "";
}

std::string check_fit_estimators() {
  EnsembleResult diffusion;
  diffusion.times.resize(41);
  diffusion.energy_mean.resize(41);
  diffusion.energy_err.assign(41, 0.0);
  for (int j = 0; j <= 40; ++j) {
    diffusion.times[static_cast<std::size_t>(j)] = static_cast<double>(j);
    diffusion.energy_mean[static_cast<std::size_t>(j)] = 25.0 * static_cast<double>(j);
  }
  const FitResult b = diffusion_fit(diffusion, 1.0);
  std::string e = expect_close(b.estimate, 12.5, 1e-9, "B from exact line");
  if (!e.empty()) return e;

  ProbabilityDistribution profile;
  profile.basis_offset = -100;
  profile.probabilities.resize(201);
  double sum = 0.0;
  for (int m = -100; m <= 100; ++m) {
    const double p = std::exp(-2.0 * std::fabs(static_cast<double>(m)) / 10.0);
    profile.probabilities[static_cast<std::size_t>(m + 100)] = p;
    sum += p;
  }
  for (auto& p : profile.probabilities) p /= sum;
  const FitResult lam = localization_fit(profile, 0);
  e = expect_close(lam.estimate, 10.0, 0.1, "lambda from exact profile");
  if (!e.empty()) return e;
  if (lam.flagged) return "exact exponential profile was flagged: " + lam.flag_reason;

  ProbabilityDistribution uniform;
  uniform.basis_offset = -100;
  uniform.probabilities.assign(201, 1.0 / 201.0);
  if (!localization_fit(uniform, 0).flagged) return "uniform profile was not flagged";

  EnsembleResult brk;
  brk.times.resize(31);
  brk.energy_mean.resize(31);
  for (int j = 0; j <= 30; ++j) {
    const double t = static_cast<double>(j);
    brk.times[static_cast<std::size_t>(j)] = t;
    brk.energy_mean[static_cast<std::size_t>(j)] = 2.0 * std::min(t, 10.0);
  }
  const FitResult ts = break_time_estimate(brk, 1.0);
  e = expect_close(ts.estimate, 20.0, 1e-9, "break time of synthetic saturation");
  if (!e.empty()) return e;
  if (ts.flagged) return "synthetic saturated curve was flagged: " + ts.flag_reason;

  EnsembleResult pure;
  pure.times = brk.times;
  pure.energy_mean.resize(31);
  for (int j = 0; j <= 30; ++j)
    pure.energy_mean[static_cast<std::size_t>(j)] = 2.0 * static_cast<double>(j);
  if (!break_time_estimate(pure, 1.0).flagged)
    return "pure diffusion was not flagged as unsaturated";
  return "";
}

std::string check_rng_streams() {
  RngStream a(42, 0), b(42, 0), c(42, 1);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t va = a.next_u64();
    if (va != b.next_u64()) return "identical streams diverged";
    if (va == c.next_u64() && i < 4) return "distinct streams collide immediately";
  }
  return "";
}

std::string check_mc_agreement() {
  TwoLevelConfig config;
  config.rabi_frequency = 1.0;
  config.measurement_interval = M_PI / 4.0;  // phi = pi/8
  config.n_steps = 4;
  config.mode = TwoLevelMode::kDephasingMc;
  config.n_realizations = 4000;
  const EnsembleResult mc = run_two_level(config, 20260825, 1);
  const Mat2 closed = measured_power(config.phase_per_step(), config.n_steps);
  const double expected = closed[2];
  const double se = mc.p2_err.back();
  const double diff = std::fabs(mc.p2_mean.back() - expected);
  if (diff > 4.0 * se + 1e-12) {
    std::ostringstream os;
    os << "dephasing MC p2 = " << mc.p2_mean.back() << " vs closed form " << expected
       << " (|diff| = " << diff << ", 4 SE = " << 4.0 * se << ")";
    return os.str();
  }
  return "";
}

}  // namespace

int VerifyReport::failed() const {
  int n = 0;
  for (const auto& c : checks)
    if (!c.passed) ++n;
  return n;
}

std::string VerifyReport::table() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    char line[160];
    std::snprintf(line, sizeof line, "[%s] %-38s %7.3fs", c.passed ? "PASS" : "FAIL",
                  c.name.c_str(), c.seconds);
    os << line;
    if (!c.passed) os << "  " << c.detail;
    os << '\n';
  }
  os << failed() << " of " << total() << " checks failed\n";
  return os.str();
}

VerifyReport run_verification() {
  VerifyReport report;
  run_check(report, "two_level closed form vs product", check_two_level_closed_form);
  run_check(report, "two_level certain transition", check_certain_transition);
  run_check(report, "two_level measurement inhibition", check_zeno_inhibition);
  run_check(report, "decay linear survival limits", check_survival_linear);
  run_check(report, "decay quadratic survival limits", check_survival_quadratic);
  run_check(report, "bessel kernel identities", check_bessel);
  run_check(report, "rotor kernel equivalence", check_kernel_equivalence);
  run_check(report, "rotor first-step exactness", check_first_step_exactness);
  run_check(report, "rotor unitarity", check_unitarity);
  run_check(report, "rotor free-rotation resonance", check_free_rotation_resonance);
  run_check(report, "decay band integral", check_decay_integral);
  run_check(report, "decay quadratic window", check_quadratic_window);
  run_check(report, "analysis estimators on synthetics", check_fit_estimators);
  run_check(report, "rng stream determinism", check_rng_streams);
  run_check(report, "two_level MC vs closed form", check_mc_agreement);
  return report;
}

}  // namespace qzeno
