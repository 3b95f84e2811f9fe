// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance checks. Each criterion exercises the toolkit the way
// a user would and prints one [PASS]/[FAIL] line; the exit code is the number
// of failures. The whole binary is budgeted to finish in well under two
// minutes on a single core.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qzeno.h"

#include "analysis.hpp"
#include "bessel.hpp"
#include "decay.hpp"
#include "rng.hpp"
#include "rotor.hpp"
#include "state.hpp"
#include "two_level.hpp"

namespace qz = qzeno;

namespace {

std::string number(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

std::string mismatch(const std::string& what, double got, double want, double tol) {
  return what + ": got " + number(got) + ", want " + number(want) + " within " +
         number(tol);
}

qz::Mat2c mul(const qz::Mat2c& a, const qz::Mat2c& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

qz::Mat2 mul(const qz::Mat2& a, const qz::Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

// --- 1 -----------------------------------------------------------------

std::string closed_forms_match_direct_products() {
  qz::RngStream rng(0x5EED01ULL, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const double phi = 3.0 * rng.next_double() + 0.01;
    qz::Mat2c coherent{1.0, 0.0, 0.0, 1.0};
    qz::Mat2 measured{1.0, 0.0, 0.0, 1.0};
    const qz::Mat2c coherent_step = qz::coherent_step_matrix(phi);
    const qz::Mat2 measured_step = qz::measured_step_matrix(phi);
    for (long n = 1; n <= 64; ++n) {
      coherent = mul(coherent_step, coherent);
      measured = mul(measured_step, measured);
      const qz::Mat2c cn = qz::coherent_power(phi, n);
      const qz::Mat2 mn = qz::measured_power(phi, n);
      for (int i = 0; i < 4; ++i) {
        if (std::abs(cn[static_cast<std::size_t>(i)] -
                     coherent[static_cast<std::size_t>(i)]) > 1e-10)
          return "coherent power n=" + std::to_string(n) + " phi=" + number(phi) +
                 " drifts from the direct product";
        if (std::fabs(mn[static_cast<std::size_t>(i)] -
                      measured[static_cast<std::size_t>(i)]) > 1e-10)
          return "measured power n=" + std::to_string(n) + " phi=" + number(phi) +
                 " drifts from the direct product";
      }
    }
  }
  return "";
}

// --- 2 -----------------------------------------------------------------

std::string stochastic_ensembles_reproduce_closed_form() {
  for (const auto mode : {qz::TwoLevelMode::kDephasingMc, qz::TwoLevelMode::kCollapseMc}) {
    qz::TwoLevelConfig c;
    c.rabi_frequency = 1.0;
    c.measurement_interval = M_PI / 4.0;
    c.n_steps = 4;
    c.mode = mode;
    c.n_realizations = 10000;
    const qz::EnsembleResult res = qz::run_two_level(c, 20260815ULL, 2);
    const double expected = qz::measured_power(c.phase_per_step(), c.n_steps)[2];
    const double got = res.p2_mean.back();
    const double se = std::max(res.p2_err.back(), 1e-9);
    if (std::fabs(got - expected) > 4.0 * se)
      return mismatch(mode == qz::TwoLevelMode::kDephasingMc
                          ? "dephasing ensemble p2"
                          : "collapse ensemble p2",
                      got, expected, 4.0 * se);
  }
  return "";
}

// --- 3 -----------------------------------------------------------------

std::string frequent_measurement_pins_the_state() {
  // Fixed total drive time T = pi. The coherent drive fully inverts the
  // populations; splitting T into n measured intervals suppresses the
  // transfer, and more finely always suppresses it further.
  for (const long n : {1L, 4L, 100L}) {
    const double phi = M_PI / (2.0 * static_cast<double>(n));
    const double p2 = std::norm(qz::coherent_power(phi, n)[2]);
    if (std::fabs(p2 - 1.0) > 1e-12)
      return mismatch("coherent inversion at n=" + std::to_string(n), p2, 1.0, 1e-12);
  }
  double previous = 1.0;
  for (const long n : {4L, 20L, 100L, 1000L}) {
    const double phi = M_PI / (2.0 * static_cast<double>(n));
    const double p2 = qz::measured_power(phi, n)[2];
    if (!(p2 < previous))
      return "transfer probability failed to shrink when measuring " +
             std::to_string(n) + " times over the same drive";
    previous = p2;
  }
  if (!(qz::measured_power(M_PI / 200.0, 100)[2] < 0.025))
    return mismatch("measured transfer after 100 interruptions",
                    qz::measured_power(M_PI / 200.0, 100)[2], 0.025, 0.0);
  if (!(qz::measured_power(M_PI / 2000.0, 1000)[2] < 0.0026))
    return mismatch("measured transfer after 1000 interruptions",
                    qz::measured_power(M_PI / 2000.0, 1000)[2], 0.0026, 0.0);
  return "";
}

// --- 4 -----------------------------------------------------------------

std::string product_law_approaches_exponential() {
  double previous_gap = 1.0;
  for (const long n : {100L, 10000L, 1000000L}) {
    const auto r = qz::survival_linear(1.0, 1.0 / static_cast<double>(n), n);
    const double gap = std::fabs(r.product_law - std::exp(-1.0));
    if (!(gap < previous_gap))
      return "survival gap to exp(-1) failed to shrink at n=" + std::to_string(n);
    previous_gap = gap;
  }
  const auto fine = qz::survival_linear(1.0, 1e-6, 1000000L);
  if (std::fabs(fine.product_law - std::exp(-1.0)) > 1e-5)
    return mismatch("(1 - gamma tau)^n at gamma tau = 1e-6", fine.product_law,
                    std::exp(-1.0), 1e-5);
  if (std::fabs(fine.product_law - fine.companion) > 1e-5)
    return mismatch("product law vs exponential companion", fine.product_law,
                    fine.companion, 1e-5);
  return "";
}

// --- 5 -----------------------------------------------------------------

std::string quadratic_decay_freezes_under_measurement() {
  double previous = 0.0;
  for (const long n : {100L, 1000L, 10000L, 100000L}) {
    const auto r = qz::survival_quadratic(1.0, 1.0 / static_cast<double>(n), n);
    const double floor = 1.0 - 1.01 / static_cast<double>(n);
    if (!(r.product_law >= floor))
      return mismatch("quadratic survival at n=" + std::to_string(n), r.product_law,
                      floor, 0.0);
    if (!(r.product_law > previous))
      return "quadratic survival failed to grow with the measurement rate at n=" +
             std::to_string(n);
    previous = r.product_law;
  }
  return "";
}

// --- 6 -----------------------------------------------------------------

std::string band_integral_is_quadratic_at_short_times() {
  const qz::SpectralModel flat;  // box band [-5, 5], |V|^2 = 0.01, rho = 1
  const double g = qz::zeno_time_coefficient(flat);
  if (std::fabs(g - 0.1) > 1e-12)
    return mismatch("flat-band quadratic coefficient", g, 0.1, 1e-12);
  for (const double t : {0.001, 0.002, 0.005, 0.01}) {
    const double ratio = qz::decay_probability_integral(flat, t) / (t * t);
    if (std::fabs(ratio / g - 1.0) > 0.02)
      return mismatch("P_decay/t^2 at t=" + number(t), ratio, g, 0.02 * g);
  }
  return "";
}

// --- 7 -----------------------------------------------------------------

std::string measured_rotor_diffuses_classically() {
  qz::RotorConfig c;
  c.kick_strength = 5.0;
  c.period = 1.0;
  c.n_kicks = 200;
  c.basis_size = 4097;
  c.schedule.every_n_kicks = 1;
  c.schedule.measure_all = true;
  c.n_realizations = 100;
  const qz::EnsembleResult res = qz::run_rotor(c, 777ULL, 2);
  const double b_classical = c.kick_strength * c.kick_strength / (4.0 * c.period);
  const qz::FitResult fit = qz::diffusion_fit(res, c.period);
  if (fit.flagged) return "diffusion fit flagged: " + fit.flag_reason;
  if (std::fabs(fit.estimate - b_classical) > 0.10 * b_classical)
    return mismatch("diffusion coefficient", fit.estimate, b_classical,
                    0.10 * b_classical);
  return "";
}

// --- 8 -----------------------------------------------------------------

std::string measurement_restores_suppressed_diffusion() {
  qz::RotorConfig base;
  base.kick_strength = 5.0;
  base.period = 1.0;
  base.n_kicks = 400;

  qz::RotorConfig none = base;
  none.schedule.every_n_kicks = 0;
  none.n_realizations = 1;

  qz::RotorConfig all = base;
  all.schedule.every_n_kicks = 1;
  all.schedule.measure_all = true;
  all.n_realizations = 50;

  const double e_none = qz::run_rotor(none, 1ULL, 1).energy_mean.back();
  const double e_all = qz::run_rotor(all, 778ULL, 2).energy_mean.back();
  if (!(e_all > 3.0 * e_none))
    return "measured final energy " + number(e_all) +
           " is not at least three times the unmeasured " + number(e_none);
  return "";
}

// --- 9 -----------------------------------------------------------------

std::string unmeasured_rotor_localizes() {
  qz::RotorConfig c;
  c.kick_strength = 5.0;
  c.period = 1.0;
  c.n_kicks = 1500;
  c.basis_size = 513;  // localization confines the state; the guard band
  c.basis_override = true;  // sized for ballistic spread is unnecessary here
  c.schedule.every_n_kicks = 0;
  c.n_realizations = 1;
  const qz::EnsembleResult res = qz::run_rotor(c, 1ULL, 1);

  const qz::FitResult loc = qz::localization_fit(res.tail_profile, res.initial_label);
  if (loc.flagged) return "localization fit flagged: " + loc.flag_reason;
  // Order-of-magnitude window around k^2/2: [k^2/4, k^2].
  if (!(loc.estimate >= 6.25 && loc.estimate <= 25.0))
    return mismatch("localization length", loc.estimate, 12.5, 12.5);
  if (!(loc.goodness >= 0.8))
    return mismatch("localization fit R^2", loc.goodness, 1.0, 0.2);

  const double b_classical = c.kick_strength * c.kick_strength / (4.0 * c.period);
  const qz::FitResult bt = qz::break_time_estimate(res, b_classical);
  if (bt.flagged) return "break-time estimate flagged: " + bt.flag_reason;
  const double expected = 0.5 * c.period * c.kick_strength * c.kick_strength;
  if (!(bt.estimate >= expected / 3.0 && bt.estimate <= 3.0 * expected))
    return mismatch("break time", bt.estimate, expected, 2.0 * expected);
  return "";
}

// --- 10 ----------------------------------------------------------------

std::string independent_kick_routes_agree() {
  const int n = 257;
  const int offset = -(n - 1) / 2;
  qz::RngStream rng(0xACCE55ULL, 3);
  std::vector<qz::complex_t> scratch;
  for (const double k : {2.0, 5.0, 10.0}) {
    qz::SpectralKicker spectral(n, offset, k);
    const std::vector<double> kernel =
        qz::bessel_kernel(k, std::min(qz::bessel_default_half_width(k), (n - 1) / 2));
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<qz::complex_t> state(static_cast<std::size_t>(n));
      double norm_sq = 0.0;
      for (auto& a : state) {
        a = qz::complex_t(rng.next_double() - 0.5, rng.next_double() - 0.5);
        norm_sq += std::norm(a);
      }
      const double scale = 1.0 / std::sqrt(norm_sq);
      for (auto& a : state) a *= scale;

      std::vector<qz::complex_t> direct = state;
      qz::kick_bessel_direct(direct, kernel, scratch);
      spectral.apply(state);
      for (std::size_t i = 0; i < state.size(); ++i)
        if (std::abs(state[i] - direct[i]) > 1e-10)
          return "angle-space and ladder-space kicks differ by " +
                 number(std::abs(state[i] - direct[i])) + " at k=" + number(k);
    }
  }

  for (const auto kernel : {qz::KickKernel::kSpectral, qz::KickKernel::kBesselDirect}) {
    qz::RotorConfig c;
    c.kick_strength = 5.0;
    c.n_kicks = 1000;
    c.basis_size = 513;
    c.basis_override = true;
    c.schedule.every_n_kicks = 0;
    c.kernel = kernel;
    const qz::RotorEngine engine(c);
    qz::RotorWorkspace workspace(engine);
    qz::RngStream stream(1ULL, 0);
    qz::StateVector state = engine.make_initial_state();
    for (long kick = 1; kick <= c.n_kicks; ++kick) {
      engine.step(state, kick, stream, workspace);
      if (std::fabs(state.norm() - 1.0) > 1e-8)
        return "norm drifted to " + number(state.norm()) + " after " +
               std::to_string(kick) + " kicks (" +
               (kernel == qz::KickKernel::kSpectral ? "angle-space" : "ladder-space") +
               " route)";
    }
  }
  return "";
}

// --- 11 ----------------------------------------------------------------

const char* kReproSpec = R"({"engine": "rotor", "master_seed": 99,
  "rotor": {"kick_strength": 5.0, "period": 1.0, "n_kicks": 40,
            "basis_size": 201, "basis_override": true,
            "schedule": "all", "n_realizations": 13}})";

std::map<std::string, std::string> artifact_map(qz_run* run) {
  std::map<std::string, std::string> out;
  for (long i = 0; i < qz_run_artifact_count(run); ++i)
    out[qz_run_artifact_name(run, i)] = qz_run_artifact_content(run, i);
  return out;
}

std::map<std::string, std::string> directory_map(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    out[entry.path().filename().string()] = buffer.str();
  }
  return out;
}

std::string runs_reproduce_across_thread_counts() {
  qz_run* one = nullptr;
  qz_run* four = nullptr;
  if (qz_run_create(kReproSpec, &one) != QZ_OK ||
      qz_run_create(kReproSpec, &four) != QZ_OK)
    return std::string("spec rejected: ") + qz_last_error();
  qz_run_set_threads(one, 1);
  qz_run_set_threads(four, 4);
  if (qz_run_execute(one) != QZ_OK || qz_run_execute(four) != QZ_OK)
    return std::string("execution failed: ") + qz_last_error();
  const bool library_identical = artifact_map(one) == artifact_map(four);
  qz_run_destroy(one);
  qz_run_destroy(four);
  if (!library_identical) return "library artifacts differ between 1 and 4 threads";

  namespace fs = std::filesystem;
  const fs::path root = "qzeno_acceptance_tmp";
  fs::remove_all(root);
  fs::create_directories(root);
  {
    std::ofstream spec(root / "spec.json", std::ios::binary);
    spec << kReproSpec << "\n";
  }
  for (const int threads : {1, 4}) {
    std::ostringstream cmd;
    cmd << '"' << QZ_CLI_PATH << "\" rotor --spec \"" << (root / "spec.json").string()
        << "\" --threads " << threads << " --out \""
        << (root / ("out" + std::to_string(threads))).string() << "\" > /dev/null";
    if (std::system(cmd.str().c_str()) != 0) {
      fs::remove_all(root);
      return "CLI run with --threads " + std::to_string(threads) + " failed";
    }
  }
  const bool cli_identical = directory_map(root / "out1") == directory_map(root / "out4");
  fs::remove_all(root);
  if (!cli_identical) return "CLI artifacts differ between 1 and 4 threads";
  return "";
}

struct Criterion {
  int id;
  const char* title;
  std::function<std::string()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "closed-form step powers match direct matrix products",
       closed_forms_match_direct_products},
      {2, "stochastic measurement ensembles reproduce the closed form",
       stochastic_ensembles_reproduce_closed_form},
      {3, "frequent measurement pins the state that coherent drive inverts",
       frequent_measurement_pins_the_state},
      {4, "repeated linear-regime measurement recovers the exponential law",
       product_law_approaches_exponential},
      {5, "faster measurement freezes quadratic-regime decay",
       quadratic_decay_freezes_under_measurement},
      {6, "band-integral decay is quadratic with the predicted coefficient",
       band_integral_is_quadratic_at_short_times},
      {7, "continuously measured rotor diffuses at the classical rate",
       measured_rotor_diffuses_classically},
      {8, "measurement restores diffusion that coherence suppresses",
       measurement_restores_suppressed_diffusion},
      {9, "unmeasured rotor localizes with the expected length and break time",
       unmeasured_rotor_localizes},
      {10, "independent kick implementations agree and preserve the norm",
       independent_kick_routes_agree},
      {11, "identical results across thread counts, in-process and via CLI",
       runs_reproduce_across_thread_counts},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string error;
    try {
      error = criterion.check();
    } catch (const std::exception& e) {
      error = std::string("unexpected exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %2d. %-62s (%5.2f s)\n", error.empty() ? "PASS" : "FAIL",
                criterion.id, criterion.title, seconds);
    if (!error.empty()) {
      std::printf("         %s\n", error.c_str());
      ++failures;
    }
  }
  std::printf("%zu/%zu acceptance criteria passed\n", criteria.size() - static_cast<std::size_t>(failures),
              criteria.size());
  return failures;
}
