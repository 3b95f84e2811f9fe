// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0

#include "rotor.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "bessel.hpp"
#include "errors.hpp"
#include "parallel.hpp"

namespace qzeno {

namespace {

// FFTW's planner (and plan destruction) is not thread-safe; execution on
// distinct buffers is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// i^m for integer m of either sign.
complex_t i_power(int m) {
  switch (((m % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

void MeasurementSchedule::validate() const {
  if (every_n_kicks < 0)
    throw ConfigError("rotor.schedule.every_n_kicks must be >= 0 (0 disables measurement)");
  if (active() && !measure_all && measured_labels.empty())
    throw ConfigError(
        "rotor.schedule.measured_labels must be non-empty when measure_all is false");
}

int guard_band_basis_size(double kick_strength, long n_kicks) {
  const double k = std::fabs(kick_strength);
  double half = std::ceil(3.0 * k * std::sqrt(static_cast<double>(n_kicks)) + k);
  half = std::min(half, 5e7);
  const long h = std::max(1L, static_cast<long>(half));
  return static_cast<int>(2 * h + 1);
}

double h0_value(const std::vector<double>& coefficients, double m) {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
    acc = acc * m + *it;
  return acc;
}

int RotorConfig::resolved_basis_size() const {
  return basis_size == 0 ? guard_band_basis_size(kick_strength, n_kicks) : basis_size;
}

void RotorConfig::validate() const {
  if (!(kick_strength > 0.0)) throw ConfigError("rotor.kick_strength must be > 0");
  if (!(period > 0.0)) throw ConfigError("rotor.period must be > 0");
  if (h0_coefficients.empty())
    throw ConfigError("rotor.h0_coefficients must have at least one coefficient");
  for (double c : h0_coefficients)
    if (!std::isfinite(c)) throw ConfigError("rotor.h0_coefficients must be finite");
  if (n_kicks < 1) throw ConfigError("rotor.n_kicks must be >= 1");
  if (n_realizations < 1) throw ConfigError("rotor.n_realizations must be >= 1");
  if (!(leakage_threshold > 0.0))
    throw ConfigError("rotor.leakage_threshold must be > 0");
  schedule.validate();
  if (basis_size != 0) {
    if (basis_size < 3) throw ConfigError("rotor.basis_size must be >= 3");
    if (basis_size % 2 == 0) {
      std::ostringstream os;
      os << "rotor.basis_size must be odd so the ladder is centered on initial_state; "
         << "try " << basis_size + 1;
      throw ConfigError(os.str());
    }
    const int guard = guard_band_basis_size(kick_strength, n_kicks);
    if (basis_size < guard && !basis_override) {
      std::ostringstream os;
      os << "rotor.basis_size " << basis_size << " is below the guard-band size "
         << guard << " for k=" << kick_strength << ", n_kicks=" << n_kicks
         << "; raise it or set basis_override=true to keep it (leakage is monitored)";
      throw ConfigError(os.str());
    }
  }
}

void free_rotation(StateVector& state, const std::vector<double>& h0_coefficients,
                   double period) {
  for (std::size_t i = 0; i < state.amplitudes.size(); ++i) {
    const double m = static_cast<double>(state.label_of(i));
    state.amplitudes[i] *= std::polar(1.0, -h0_value(h0_coefficients, m) * period);
  }
}

void kick_bessel_direct(std::vector<complex_t>& amplitudes,
                        const std::vector<double>& kernel,
                        std::vector<complex_t>& scratch) {
  const int n = static_cast<int>(amplitudes.size());
  if (kernel.empty() || kernel.size() % 2 == 0)
    throw DomainError("kick kernel length must be odd");
  const int w = (static_cast<int>(kernel.size()) - 1) / 2;
  if (w >= n) throw DomainError("kick kernel is wider than the basis");
  scratch.resize(amplitudes.size());
  // Terms that wrap around the ring pick up i^{-+n}: the i^{-m} basis
  // convention is periodic only up to that phase, and the angle-space route
  // realizes exactly this circulant. Wrapped terms matter only for states
  // with support at the basis edge.
  const complex_t wrap_up = i_power(-n);
  const complex_t wrap_down = i_power(n);
  for (int j = 0; j < n; ++j) {
    complex_t acc(0.0, 0.0);
    for (int d = -w; d <= w; ++d) {
      int src = j - d;
      if (src < 0) {
        acc += wrap_up * kernel[static_cast<std::size_t>(w + d)] *
               amplitudes[static_cast<std::size_t>(src + n)];
      } else if (src >= n) {
        acc += wrap_down * kernel[static_cast<std::size_t>(w + d)] *
               amplitudes[static_cast<std::size_t>(src - n)];
      } else {
        acc += kernel[static_cast<std::size_t>(w + d)] *
               amplitudes[static_cast<std::size_t>(src)];
      }
    }
    scratch[static_cast<std::size_t>(j)] = acc;
  }
  amplitudes.swap(scratch);
}

struct SpectralKicker::Impl {
  int n = 0;
  std::vector<complex_t> undo_convention;  // i^{-m}
  std::vector<complex_t> redo_convention;  // i^{+m} / n
  std::vector<complex_t> kick_phase;       // exp(-i k cos theta_l)
  fftw_complex* buf = nullptr;
  fftw_plan to_angle = nullptr;
  fftw_plan to_ladder = nullptr;

  ~Impl() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    if (to_angle) fftw_destroy_plan(to_angle);
    if (to_ladder) fftw_destroy_plan(to_ladder);
    if (buf) fftw_free(buf);
  }
};

SpectralKicker::SpectralKicker(int basis_size, int basis_offset, double kick_strength)
    : impl_(new Impl) {
  if (basis_size < 2) throw DomainError("spectral kicker needs basis_size >= 2");
  Impl& im = *impl_;
  im.n = basis_size;
  im.undo_convention.resize(static_cast<std::size_t>(basis_size));
  im.redo_convention.resize(static_cast<std::size_t>(basis_size));
  im.kick_phase.resize(static_cast<std::size_t>(basis_size));
  const double inv_n = 1.0 / static_cast<double>(basis_size);
  for (int j = 0; j < basis_size; ++j) {
    const int m = basis_offset + j;
    im.undo_convention[static_cast<std::size_t>(j)] = i_power(-m);
    im.redo_convention[static_cast<std::size_t>(j)] = i_power(m) * inv_n;
  }
  for (int l = 0; l < basis_size; ++l) {
    const double theta = 2.0 * M_PI * static_cast<double>(l) / static_cast<double>(basis_size);
    im.kick_phase[static_cast<std::size_t>(l)] =
        std::polar(1.0, -kick_strength * std::cos(theta));
  }
  im.buf = fftw_alloc_complex(static_cast<std::size_t>(basis_size));
  if (!im.buf) throw NumericError("spectral kicker: buffer allocation failed");
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    im.to_angle = fftw_plan_dft_1d(basis_size, im.buf, im.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    im.to_ladder = fftw_plan_dft_1d(basis_size, im.buf, im.buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  if (!im.to_angle || !im.to_ladder)
    throw NumericError("spectral kicker: FFT plan creation failed");
}

SpectralKicker::~SpectralKicker() = default;

void SpectralKicker::apply(std::vector<complex_t>& amplitudes) {
  Impl& im = *impl_;
  if (static_cast<int>(amplitudes.size()) != im.n)
    throw DomainError("state size does not match the spectral kicker");
  auto* b = reinterpret_cast<complex_t*>(im.buf);
  for (int j = 0; j < im.n; ++j)
    b[j] = amplitudes[static_cast<std::size_t>(j)] *
           im.undo_convention[static_cast<std::size_t>(j)];
  fftw_execute(im.to_angle);
  for (int l = 0; l < im.n; ++l) b[l] *= im.kick_phase[static_cast<std::size_t>(l)];
  fftw_execute(im.to_ladder);
  for (int j = 0; j < im.n; ++j)
    amplitudes[static_cast<std::size_t>(j)] =
        b[j] * im.redo_convention[static_cast<std::size_t>(j)];
}

std::vector<std::string> resonance_diagnostics(double period,
                                               const std::vector<double>& h0_coefficients) {
  std::vector<std::string> out;
  const std::vector<double> standard{0.0, 0.0, 0.5};
  if (h0_coefficients != standard) return out;
  for (int q = 1; q <= 8; ++q) {
    const double x = period * static_cast<double>(q) / (4.0 * M_PI);
    const double p = std::round(x);
    if (p != 0.0 && std::fabs(x - p) < 1e-9) {
      std::ostringstream os;
      os << "period tau = " << period << " sits on a low-order quantum resonance "
         << "(tau = 4*pi*" << static_cast<long>(p) << "/" << q
         << "); free-rotation phases degenerate and localization estimates are unreliable";
      out.push_back(os.str());
      break;
    }
  }
  return out;
}

RotorObservables rotor_observables(const ProbabilityDistribution& dist, int m0,
                                   int edge_bins) {
  const auto& p = dist.probabilities;
  const std::size_t n = p.size();
  RotorObservables obs;
  double sum = 0.0, sum_sq = 0.0, energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pi = p[i];
    const double d = static_cast<double>(dist.label_of(i) - m0);
    sum += pi;
    sum_sq += pi * pi;
    energy += pi * d * d;
  }
  double leak = 0.0;
  const std::size_t edge = static_cast<std::size_t>(std::max(edge_bins, 0));
  for (std::size_t i = 0; i < std::min(edge, n); ++i) leak += p[i];
  for (std::size_t i = n >= edge ? n - edge : 0; i < n; ++i) leak += p[i];
  obs.norm_sq = sum;
  obs.energy = energy;
  obs.participation = sum_sq > 0.0 ? sum * sum / sum_sq : 0.0;
  obs.leakage = leak;
  return obs;
}

RotorEngine::RotorEngine(const RotorConfig& config) : config_(config) {
  config_.validate();
  basis_size_ = config_.resolved_basis_size();
  basis_offset_ = config_.initial_state - (basis_size_ - 1) / 2;
  edge_bins_ = std::max(1, basis_size_ / 40);
  if (config_.schedule.active() && !config_.schedule.measure_all) {
    for (int label : config_.schedule.measured_labels) {
      if (label < basis_offset_ || label >= basis_offset_ + basis_size_) {
        std::ostringstream os;
        os << "rotor.schedule.measured_labels entry " << label
           << " lies outside the ladder [" << basis_offset_ << ", "
           << basis_offset_ + basis_size_ - 1 << "]";
        throw ConfigError(os.str());
      }
    }
  }
  free_phase_.resize(static_cast<std::size_t>(basis_size_));
  for (int j = 0; j < basis_size_; ++j) {
    const double m = static_cast<double>(basis_offset_ + j);
    free_phase_[static_cast<std::size_t>(j)] =
        std::polar(1.0, -h0_value(config_.h0_coefficients, m) * config_.period);
  }
  if (config_.kernel == KickKernel::kBesselDirect) {
    int w = bessel_default_half_width(config_.kick_strength);
    w = std::min(w, (basis_size_ - 1) / 2);
    kernel_ = bessel_kernel(config_.kick_strength, w);
  }
}

StateVector RotorEngine::make_initial_state() const {
  return StateVector::basis_state(basis_size_, basis_offset_, config_.initial_state);
}

void RotorEngine::step(StateVector& state, long kick_index, RngStream& rng,
                       RotorWorkspace& workspace) const {
  if (config_.schedule.measure_before_kick(kick_index)) {
    if (config_.schedule.measure_all)
      randomize_phases_all(state, rng);
    else
      randomize_phases(state, config_.schedule.measured_labels, rng);
  }
  if (config_.kernel == KickKernel::kSpectral)
    workspace.spectral()->apply(state.amplitudes);
  else
    kick_bessel_direct(state.amplitudes, kernel_, workspace.scratch());
  for (std::size_t j = 0; j < state.amplitudes.size(); ++j)
    state.amplitudes[j] *= free_phase_[j];
}

RotorWorkspace::RotorWorkspace(const RotorEngine& engine) {
  scratch_.resize(static_cast<std::size_t>(engine.basis_size()));
  if (engine.config().kernel == KickKernel::kSpectral)
    spectral_ = std::make_unique<SpectralKicker>(
        engine.basis_size(), engine.basis_offset(), engine.config().kick_strength);
}

namespace {

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

EnsembleResult run_rotor(const RotorConfig& config, std::uint64_t master_seed,
                         int n_threads) {
  RotorEngine engine(config);
  const long n = config.n_kicks;
  const std::size_t n_points = static_cast<std::size_t>(n) + 1;
  const int basis_n = engine.basis_size();
  const int offset = engine.basis_offset();
  const int m0 = config.initial_state;
  const int edge = engine.edge_bins();
  const long n_tail = std::max<long>(1, n / 4);
  const long tail_first = n - n_tail + 1;

  EnsembleResult res;
  res.initial_label = m0;
  res.n_realizations = config.n_realizations;
  res.times.resize(n_points);
  for (long j = 0; j <= n; ++j)
    res.times[static_cast<std::size_t>(j)] = static_cast<double>(j) * config.period;
  res.final_profile.basis_offset = offset;
  res.final_profile.probabilities.assign(static_cast<std::size_t>(basis_n), 0.0);
  res.tail_profile.basis_offset = offset;
  res.tail_profile.probabilities.assign(static_cast<std::size_t>(basis_n), 0.0);

  n_threads = resolve_thread_count(n_threads);
  std::vector<std::unique_ptr<RotorWorkspace>> workspaces;
  workspaces.reserve(static_cast<std::size_t>(n_threads));
  for (int w = 0; w < n_threads; ++w)
    workspaces.push_back(std::make_unique<RotorWorkspace>(engine));

  const long n_real = config.n_realizations;
  std::vector<Welford> acc_energy(n_points), acc_part(n_points), acc_leak(n_points);
  std::vector<double> final_sum(static_cast<std::size_t>(basis_n), 0.0);
  std::vector<double> tail_sum(static_cast<std::size_t>(basis_n), 0.0);
  double leak_max = 0.0;

  const std::size_t per_real = 3 * n_points + 2 * static_cast<std::size_t>(basis_n);
  const long chunk = std::max<long>(
      1, std::min<long>(n_real, static_cast<long>(2'000'000 / std::max<std::size_t>(per_real, 1))));

  std::vector<double> buf_energy(static_cast<std::size_t>(chunk) * n_points);
  std::vector<double> buf_part(static_cast<std::size_t>(chunk) * n_points);
  std::vector<double> buf_leak(static_cast<std::size_t>(chunk) * n_points);
  std::vector<double> buf_final(static_cast<std::size_t>(chunk) * static_cast<std::size_t>(basis_n));
  std::vector<double> buf_tail(static_cast<std::size_t>(chunk) * static_cast<std::size_t>(basis_n));

  for (long chunk_begin = 0; chunk_begin < n_real; chunk_begin += chunk) {
    const long m = std::min(chunk, n_real - chunk_begin);
    parallel_for_index_workers(m, n_threads, [&](int worker, long r) {
      RotorWorkspace& ws = *workspaces[static_cast<std::size_t>(worker)];
      RngStream rng(master_seed, static_cast<std::uint64_t>(chunk_begin + r));
      StateVector s = engine.make_initial_state();

      double* e_row = buf_energy.data() + static_cast<std::size_t>(r) * n_points;
      double* p_row = buf_part.data() + static_cast<std::size_t>(r) * n_points;
      double* l_row = buf_leak.data() + static_cast<std::size_t>(r) * n_points;
      double* f_row = buf_final.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(basis_n);
      double* t_row = buf_tail.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(basis_n);
      std::fill(t_row, t_row + basis_n, 0.0);

      ProbabilityDistribution dist;
      dist.basis_offset = offset;
      dist.probabilities.resize(static_cast<std::size_t>(basis_n));

      for (std::size_t i = 0; i < dist.probabilities.size(); ++i)
        dist.probabilities[i] = std::norm(s.amplitudes[i]);
      RotorObservables obs = rotor_observables(dist, m0, edge);
      e_row[0] = obs.energy;
      p_row[0] = obs.participation;
      l_row[0] = obs.leakage;

      for (long j = 1; j <= n; ++j) {
        engine.step(s, j, rng, ws);
        for (std::size_t i = 0; i < dist.probabilities.size(); ++i)
          dist.probabilities[i] = std::norm(s.amplitudes[i]);
        obs = rotor_observables(dist, m0, edge);
        if (!std::isfinite(obs.norm_sq)) {
          std::ostringstream os;
          os << "non-finite amplitudes at kick " << j << " (realization "
             << chunk_begin + r << ")";
          throw NumericError(os.str());
        }
        if (std::fabs(obs.norm_sq - 1.0) > 1e-6) {
          std::ostringstream os;
          os << "norm drift " << obs.norm_sq - 1.0 << " at kick " << j
             << " (realization " << chunk_begin + r << ")";
          throw NumericError(os.str());
        }
        e_row[j] = obs.energy;
        p_row[j] = obs.participation;
        l_row[j] = obs.leakage;
        if (j >= tail_first)
          for (int i = 0; i < basis_n; ++i)
            t_row[i] += dist.probabilities[static_cast<std::size_t>(i)];
        if (j == n)
          for (int i = 0; i < basis_n; ++i)
            f_row[i] = dist.probabilities[static_cast<std::size_t>(i)];
      }
      const double inv_tail = 1.0 / static_cast<double>(n_tail);
      for (int i = 0; i < basis_n; ++i) t_row[i] *= inv_tail;
    });

    for (long r = 0; r < m; ++r) {
      const double* e_row = buf_energy.data() + static_cast<std::size_t>(r) * n_points;
      const double* p_row = buf_part.data() + static_cast<std::size_t>(r) * n_points;
      const double* l_row = buf_leak.data() + static_cast<std::size_t>(r) * n_points;
      const double* f_row = buf_final.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(basis_n);
      const double* t_row = buf_tail.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(basis_n);
      for (std::size_t kdx = 0; kdx < n_points; ++kdx) {
        acc_energy[kdx].add(e_row[kdx]);
        acc_part[kdx].add(p_row[kdx]);
        acc_leak[kdx].add(l_row[kdx]);
        leak_max = std::max(leak_max, l_row[kdx]);
      }
      for (int i = 0; i < basis_n; ++i) {
        final_sum[static_cast<std::size_t>(i)] += f_row[i];
        tail_sum[static_cast<std::size_t>(i)] += t_row[i];
      }
    }
  }

  res.energy_mean.resize(n_points);
  res.energy_err.resize(n_points);
  res.participation_mean.resize(n_points);
  res.participation_err.resize(n_points);
  res.leakage_mean.resize(n_points);
  for (std::size_t kdx = 0; kdx < n_points; ++kdx) {
    res.energy_mean[kdx] = acc_energy[kdx].mean;
    res.energy_err[kdx] = acc_energy[kdx].std_error();
    res.participation_mean[kdx] = acc_part[kdx].mean;
    res.participation_err[kdx] = acc_part[kdx].std_error();
    res.leakage_mean[kdx] = acc_leak[kdx].mean;
  }
  const double inv_r = 1.0 / static_cast<double>(n_real);
  for (int i = 0; i < basis_n; ++i) {
    res.final_profile.probabilities[static_cast<std::size_t>(i)] =
        final_sum[static_cast<std::size_t>(i)] * inv_r;
    res.tail_profile.probabilities[static_cast<std::size_t>(i)] =
        tail_sum[static_cast<std::size_t>(i)] * inv_r;
  }
  res.leakage_max = leak_max;

  if (leak_max > config.leakage_threshold) {
    std::ostringstream os;
    os << "leakage " << leak_max << " exceeded the threshold "
       << config.leakage_threshold
       << "; the ladder is too small for this run, results near the edges are truncated";
    res.warnings.push_back(os.str());
  }
  for (auto& w : resonance_diagnostics(config.period, config.h0_coefficients))
    res.warnings.push_back(std::move(w));
  return res;
}

}  // namespace qzeno
