// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0
//
// Quantum kicked rotor on a truncated, centered momentum ladder. One period
// maps amplitudes through an optional phase-randomizing measurement, the
// kick convolution a'_m = sum_n J_{m-n}(k) a_n, and the free rotation
// a_m *= exp(-i H0(m) tau). The i^{-m} basis convention is absorbed into
// both kick kernels so the convolution form holds for stored amplitudes.

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "state.hpp"

namespace qzeno {

enum class KickKernel { kBesselDirect, kSpectral };

struct MeasurementSchedule {
  long every_n_kicks = 0;  // 0: never measure
  bool measure_all = true;
  std::vector<int> measured_labels;  // used when measure_all is false

  bool active() const { return every_n_kicks >= 1; }
  // Kicks are numbered 1..n_kicks; a measurement precedes kick j when the
  // preceding kicks complete a full group, so every_n_kicks=1 measures
  // before kicks 2, 3, ... (never before the first kick).
  bool measure_before_kick(long kick_index) const {
    return active() && kick_index > 1 && (kick_index - 1) % every_n_kicks == 0;
  }
  void validate() const;
};

struct RotorConfig {
  double kick_strength = 5.0;  // k, dimensionless, > 0
  double period = 1.0;         // tau, > 0
  std::vector<double> h0_coefficients{0.0, 0.0, 0.5};  // H0(m) = sum_i c_i m^i
  long n_kicks = 100;
  int basis_size = 0;           // odd; 0 requests guard_band_basis_size
  bool basis_override = false;  // accept a basis below the guard-band rule
  int initial_state = 0;        // ladder label m0 (basis is centered on it)
  MeasurementSchedule schedule;
  long n_realizations = 1;
  KickKernel kernel = KickKernel::kSpectral;
  double leakage_threshold = 1e-8;

  int resolved_basis_size() const;
  void validate() const;
};

// Smallest odd ladder that keeps the diffusive cloud away from the edges:
// 2 * ceil(c * k * sqrt(n_kicks) + k) + 1 with c = 3.
int guard_band_basis_size(double kick_strength, long n_kicks);

// H0(m) for polynomial coefficients in ascending powers.
double h0_value(const std::vector<double>& coefficients, double m);

// a_m *= exp(-i H0(m) tau) for every stored label m.
void free_rotation(StateVector& state, const std::vector<double>& h0_coefficients,
                   double period);

// Kick as a circular convolution of the stored amplitudes with a centered
// Bessel kernel (length 2w+1, w < basis size). For states that respect the
// guard band this equals the infinite-ladder convolution.
void kick_bessel_direct(std::vector<complex_t>& amplitudes,
                        const std::vector<double>& kernel,
                        std::vector<complex_t>& scratch);

// Kick in the angle representation: undo the i^{-m} convention, DFT to the
// angle grid, multiply by exp(-i k cos theta), transform back, restore the
// convention. Owns its FFT buffers; one instance per thread.
class SpectralKicker {
 public:
  SpectralKicker(int basis_size, int basis_offset, double kick_strength);
  ~SpectralKicker();
  SpectralKicker(const SpectralKicker&) = delete;
  SpectralKicker& operator=(const SpectralKicker&) = delete;

  void apply(std::vector<complex_t>& amplitudes);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Low-order quantum resonance report: warnings when tau is within 1e-9 of
// 4*pi*p/q for q <= 8 (free-rotation phases degenerate, no localization).
// Only meaningful for the default H0 = m^2/2; empty otherwise.
std::vector<std::string> resonance_diagnostics(double period,
                                               const std::vector<double>& h0_coefficients);

struct RotorObservables {
  double energy = 0.0;         // sum_m P_m (m - m0)^2
  double participation = 1.0;  // (sum P)^2 / sum P^2
  double leakage = 0.0;        // probability in the outer 5% of the ladder
  double norm_sq = 1.0;
};

RotorObservables rotor_observables(const ProbabilityDistribution& dist, int m0,
                                   int edge_bins);

class RotorWorkspace;

// Immutable per-run tables (free-rotation phases, kick kernel, geometry).
// Shared across threads; all mutable scratch lives in RotorWorkspace.
class RotorEngine {
 public:
  explicit RotorEngine(const RotorConfig& config);

  const RotorConfig& config() const { return config_; }
  int basis_size() const { return basis_size_; }
  int basis_offset() const { return basis_offset_; }
  int edge_bins() const { return edge_bins_; }

  StateVector make_initial_state() const;

  // One full period with 1-based kick index: measurement per schedule, then
  // kick, then free rotation.
  void step(StateVector& state, long kick_index, RngStream& rng,
            RotorWorkspace& workspace) const;

 private:
  friend class RotorWorkspace;

  RotorConfig config_;
  int basis_size_ = 0;
  int basis_offset_ = 0;
  int edge_bins_ = 1;
  std::vector<complex_t> free_phase_;
  std::vector<double> kernel_;  // bessel_direct only
};

class RotorWorkspace {
 public:
  explicit RotorWorkspace(const RotorEngine& engine);

  std::vector<complex_t>& scratch() { return scratch_; }
  SpectralKicker* spectral() { return spectral_.get(); }

 private:
  std::vector<complex_t> scratch_;
  std::unique_ptr<SpectralKicker> spectral_;
};

// Full ensemble run. Realizations use independent RNG streams; results are
// bit-identical for any thread count.
EnsembleResult run_rotor(const RotorConfig& config, std::uint64_t master_seed,
                         int n_threads = 1);

}  // namespace qzeno
