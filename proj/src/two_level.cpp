// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0

#include "two_level.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"

namespace qzeno {

Mat2c coherent_step_matrix(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return {complex_t(c, 0.0), complex_t(0.0, s), complex_t(0.0, s), complex_t(c, 0.0)};
}

Mat2c coherent_power(double phi, long n) {
  if (n < 0) throw DomainError("coherent_power requires n >= 0");
  // A is a rotation by phi in the (|1>, i|2>) plane, so A^n rotates by n*phi.
  return coherent_step_matrix(phi * static_cast<double>(n));
}

Mat2 measured_step_matrix(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return {c * c, s * s, s * s, c * c};
}

Mat2 measured_power(double phi, long n) {
  if (n < 0) throw DomainError("measured_power requires n >= 0");
  const double c = std::cos(2.0 * phi);
  const double cn = std::pow(c, static_cast<double>(n));
  return {0.5 * (1.0 + cn), 0.5 * (1.0 - cn), 0.5 * (1.0 - cn), 0.5 * (1.0 + cn)};
}

void TwoLevelConfig::validate() const {
  if (!(rabi_frequency > 0.0))
    throw ConfigError("two_level.rabi_frequency must be > 0");
  if (!(measurement_interval > 0.0))
    throw ConfigError("two_level.measurement_interval must be > 0");
  if (n_steps < 1) throw ConfigError("two_level.n_steps must be >= 1");
  if (initial_state != 0 && initial_state != 1)
    throw ConfigError("two_level.initial_state must be 0 or 1");
  if (mode != TwoLevelMode::kAnalytic && n_realizations < 1)
    throw ConfigError("two_level.n_realizations must be >= 1 in Monte Carlo modes");
}

namespace {

// In-place application of coherent_step_matrix to a 2-amplitude state.
void apply_coherent_step(StateVector& s, double cos_phi, double sin_phi) {
  const complex_t a1 = s.amplitudes[0];
  const complex_t a2 = s.amplitudes[1];
  const complex_t is(0.0, sin_phi);
  s.amplitudes[0] = cos_phi * a1 + is * a2;
  s.amplitudes[1] = is * a1 + cos_phi * a2;
}

// Welford accumulator; updates happen in realization-index order so results
// are independent of thread scheduling.
struct Welford {
  long count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }
  double std_error() const {
    if (count < 2) return 0.0;
    const double var = m2 / static_cast<double>(count - 1);
    return std::sqrt(var / static_cast<double>(count));
  }
};

}  // namespace

EnsembleResult run_two_level(const TwoLevelConfig& config, std::uint64_t master_seed,
                             int n_threads) {
  config.validate();
  const long n = config.n_steps;
  const double tau = config.measurement_interval;
  const double phi = config.phase_per_step();

  EnsembleResult res;
  res.initial_label = config.initial_state;
  res.times.resize(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k)
    res.times[static_cast<std::size_t>(k)] = static_cast<double>(k) * tau;

  const std::size_t n_points = res.times.size();
  res.p1_mean.assign(n_points, 0.0);
  res.p1_err.assign(n_points, 0.0);
  res.p2_mean.assign(n_points, 0.0);
  res.p2_err.assign(n_points, 0.0);

  if (config.mode == TwoLevelMode::kAnalytic) {
    res.n_realizations = 1;
    const double p1_0 = config.initial_state == 0 ? 1.0 : 0.0;
    const double p2_0 = 1.0 - p1_0;
    for (long k = 0; k <= n; ++k) {
      const Mat2 mk = measured_power(phi, k);
      res.p1_mean[static_cast<std::size_t>(k)] = mk[0] * p1_0 + mk[1] * p2_0;
      res.p2_mean[static_cast<std::size_t>(k)] = mk[2] * p1_0 + mk[3] * p2_0;
    }
    return res;
  }

  const long n_real = config.n_realizations;
  res.n_realizations = n_real;
  const bool collapse = config.mode == TwoLevelMode::kCollapseMc;
  const double cos_phi = std::cos(phi);
  const double sin_phi = std::sin(phi);

  std::vector<Welford> acc1(n_points), acc2(n_points);

  // Realizations are computed in parallel into per-realization slots and
  // folded in index order afterwards, so the ensemble statistics are
  // bit-identical for any thread count.
  const long chunk =
      std::max<long>(1, std::min<long>(n_real, 4'000'000 / static_cast<long>(n_points)));
  std::vector<double> buf1(static_cast<std::size_t>(chunk) * n_points);
  std::vector<double> buf2(static_cast<std::size_t>(chunk) * n_points);

  for (long chunk_begin = 0; chunk_begin < n_real; chunk_begin += chunk) {
    const long m = std::min(chunk, n_real - chunk_begin);
    parallel_for_index(m, n_threads, [&](long r) {
      RngStream rng(master_seed, static_cast<std::uint64_t>(chunk_begin + r));
      StateVector s = StateVector::basis_state(2, 0, config.initial_state);
      double* row1 = buf1.data() + static_cast<std::size_t>(r) * n_points;
      double* row2 = buf2.data() + static_cast<std::size_t>(r) * n_points;
      row1[0] = std::norm(s.amplitudes[0]);
      row2[0] = std::norm(s.amplitudes[1]);
      for (long k = 1; k <= n; ++k) {
        apply_coherent_step(s, cos_phi, sin_phi);
        row1[k] = std::norm(s.amplitudes[0]);
        row2[k] = std::norm(s.amplitudes[1]);
        if (k < n) {
          if (collapse) {
            const int label = sample_projection(probabilities(s), rng);
            s = StateVector::basis_state(2, 0, label);
          } else {
            randomize_phases_all(s, rng);
          }
        }
      }
    });
    for (long r = 0; r < m; ++r) {
      const double* row1 = buf1.data() + static_cast<std::size_t>(r) * n_points;
      const double* row2 = buf2.data() + static_cast<std::size_t>(r) * n_points;
      for (std::size_t k = 0; k < n_points; ++k) {
        acc1[k].add(row1[k]);
        acc2[k].add(row2[k]);
      }
    }
  }

  for (std::size_t k = 0; k < n_points; ++k) {
    res.p1_mean[k] = acc1[k].mean;
    res.p1_err[k] = acc1[k].std_error();
    res.p2_mean[k] = acc2[k].mean;
    res.p2_err[k] = acc2[k].std_error();
  }
  return res;
}

}  // namespace qzeno
