// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0

#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace qzeno {

namespace {

struct LinFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_err = 0.0;
  double r2 = 1.0;
};

// Weighted least squares; empty weights mean a uniform fit. With weights
// 1/sigma^2 the slope error is the standard propagated one, otherwise it is
// residual-based.
LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                  const std::vector<double>& w) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw FitError("linear fit needs at least 2 points");
  const bool weighted = !w.empty();

  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = weighted ? w[i] : 1.0;
    sw += wi;
    sx += wi * x[i];
    sy += wi * y[i];
  }
  if (!(sw > 0.0)) throw FitError("linear fit weights sum to zero");
  const double xbar = sx / sw;
  const double ybar = sy / sw;

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = weighted ? w[i] : 1.0;
    sxx += wi * (x[i] - xbar) * (x[i] - xbar);
    sxy += wi * (x[i] - xbar) * (y[i] - ybar);
  }
  if (!(sxx > 0.0)) throw FitError("linear fit abscissae are degenerate");

  LinFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;

  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = weighted ? w[i] : 1.0;
    const double pred = fit.intercept + fit.slope * x[i];
    ss_res += wi * (y[i] - pred) * (y[i] - pred);
    ss_tot += wi * (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

  if (weighted) {
    fit.slope_err = std::sqrt(1.0 / sxx);
  } else if (n > 2) {
    fit.slope_err = std::sqrt(ss_res / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

}  // namespace

FitResult diffusion_fit(const EnsembleResult& result, double tau) {
  if (!(tau > 0.0)) throw FitError("diffusion_fit requires tau > 0");
  const std::size_t n = result.times.size();
  if (result.energy_mean.size() != n)
    throw FitError("diffusion_fit needs an energy series");
  const std::size_t begin = 3;  // drop t=0 and the first 2 kicks
  if (n < begin + 10)
    throw FitError("diffusion_fit needs at least 10 points after the first 2 kicks");

  std::vector<double> x(result.times.begin() + static_cast<long>(begin), result.times.end());
  std::vector<double> y(result.energy_mean.begin() + static_cast<long>(begin),
                        result.energy_mean.end());
  std::vector<double> w;
  if (result.energy_err.size() == n) {
    bool all_positive = true;
    for (std::size_t i = begin; i < n; ++i)
      if (!(result.energy_err[i] > 0.0)) {
        all_positive = false;
        break;
      }
    if (all_positive) {
      w.resize(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double s = result.energy_err[begin + i];
        w[i] = 1.0 / (s * s);
      }
    }
  }

  const LinFit fit = linear_fit(x, y, w);
  FitResult out;
  out.estimate = 0.5 * fit.slope;
  out.std_error = 0.5 * fit.slope_err;
  out.window_begin = begin;
  out.window_end = n;
  out.goodness = fit.r2;
  return out;
}

FitResult localization_fit(const ProbabilityDistribution& profile, int m0,
                           const LocalizationFitOptions& options) {
  const auto& p = profile.probabilities;
  if (p.size() < 5) throw FitError("localization_fit needs at least 5 bins");

  // Bins that sit on the numerical noise plateau would flatten a log-space
  // fit; anything 24 decades below the peak is roundoff, not signal.
  double p_max = 0.0;
  for (const double v : p) p_max = std::max(p_max, v);
  const double floor = std::max(options.floor, p_max * 1e-24);

  // Usable bins and the profile's radial extent.
  double r_max = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > floor)
      r_max = std::max(r_max, std::fabs(static_cast<double>(profile.label_of(i) - m0)));
  }
  if (!(r_max > 0.0)) throw FitError("localization_fit: profile has no usable bins");
  const double excluded = options.central_exclusion * r_max;

  std::vector<double> x, y;
  std::size_t left = 0, right = 0;
  double d_min = r_max, d_max = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > floor)) continue;
    const double d = std::fabs(static_cast<double>(profile.label_of(i) - m0));
    if (d <= excluded) continue;
    x.push_back(d);
    y.push_back(std::log(p[i]));
    if (profile.label_of(i) < m0) ++left;
    if (profile.label_of(i) > m0) ++right;
    d_min = std::min(d_min, d);
    d_max = std::max(d_max, d);
  }
  if (x.size() < 2) throw FitError("localization_fit: fewer than 2 tail bins");

  FitResult out;
  out.window_begin = static_cast<std::size_t>(d_min);
  out.window_end = static_cast<std::size_t>(d_max) + 1;

  if (left < options.min_tail_bins_per_side || right < options.min_tail_bins_per_side) {
    out.flagged = true;
    std::ostringstream os;
    os << "only " << left << "/" << right << " usable tail bins (left/right); need "
       << options.min_tail_bins_per_side << " per side";
    out.flag_reason = os.str();
  }

  // Log-space residuals of localized profiles are homoscedastic, so the fit
  // is unweighted; probability weights would shrink the window to a few
  // decay lengths and let bin-to-bin fluctuations dominate.
  const LinFit fit = linear_fit(x, y, {});
  out.goodness = fit.r2;
  if (fit.slope < 0.0) {
    out.estimate = -2.0 / fit.slope;
    out.std_error = 2.0 / (fit.slope * fit.slope) * fit.slope_err;
  } else {
    out.estimate = 0.0;
    out.std_error = 0.0;
    out.flagged = true;
    if (!out.flag_reason.empty()) out.flag_reason += "; ";
    out.flag_reason += "profile does not decay away from the center";
  }
  if (fit.r2 < options.r2_floor) {
    out.flagged = true;
    if (!out.flag_reason.empty()) out.flag_reason += "; ";
    std::ostringstream os;
    os << "R^2 = " << fit.r2 << " below the exponential-profile floor " << options.r2_floor;
    out.flag_reason += os.str();
  }
  return out;
}

FitResult break_time_estimate(const EnsembleResult& result, double b_classical,
                              const BreakTimeOptions& options) {
  const std::size_t n = result.times.size();
  if (n < 8 || result.energy_mean.size() != n)
    throw FitError("break_time_estimate needs at least 8 energy points");
  if (!(b_classical > 0.0))
    throw FitError("break_time_estimate requires b_classical > 0");

  FitResult out;
  out.window_begin = 1;
  out.window_end = n;

  // Saturation gate: compare unweighted slopes over the first and last
  // quarters of the run.
  const std::size_t q = std::max<std::size_t>(3, n / 4);
  std::vector<double> x0(result.times.begin() + 1, result.times.begin() + static_cast<long>(1 + q));
  std::vector<double> y0(result.energy_mean.begin() + 1,
                         result.energy_mean.begin() + static_cast<long>(1 + q));
  std::vector<double> x1(result.times.end() - static_cast<long>(q), result.times.end());
  std::vector<double> y1(result.energy_mean.end() - static_cast<long>(q),
                         result.energy_mean.end());
  const LinFit early = linear_fit(x0, y0, {});
  const LinFit late = linear_fit(x1, y1, {});
  if (!(early.slope > 0.0)) {
    out.flagged = true;
    out.flag_reason = "no initial energy growth";
  } else if (late.slope >= options.saturation_ratio * early.slope) {
    out.flagged = true;
    std::ostringstream os;
    os << "growth has not saturated (late slope " << late.slope << " vs early "
       << early.slope << ")";
    out.flag_reason = os.str();
  }

  // First crossing below threshold * classical prediction 2 B t. A centered
  // moving average absorbs single-kick fluctuations that would otherwise
  // trigger a spuriously early crossing.
  std::vector<double> smooth(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t lo = i >= 3 ? i - 2 : 1;
    const std::size_t hi = std::min(n - 1, i + 2);
    double acc = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) acc += result.energy_mean[j];
    smooth[i] = acc / static_cast<double>(hi - lo + 1);
  }
  auto deficit = [&](std::size_t i) {
    return smooth[i] - options.threshold * 2.0 * b_classical * result.times[i];
  };
  std::size_t cross = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (deficit(i) < 0.0) {
      cross = i;
      break;
    }
  }
  if (cross == 0) {
    out.flagged = true;
    if (!out.flag_reason.empty()) out.flag_reason += "; ";
    out.flag_reason += "energy never fell below the classical-diffusion threshold";
    out.estimate = 0.0;
    return out;
  }

  const double f_prev = deficit(cross - 1);
  const double f_here = deficit(cross);
  const double t_prev = result.times[cross - 1];
  const double t_here = result.times[cross];
  const double frac = f_prev / (f_prev - f_here);
  out.estimate = t_prev + frac * (t_here - t_prev);
  out.std_error = 0.5 * (t_here - t_prev);
  out.window_end = cross + 1;
  out.goodness = 0.0;
  return out;
}

}  // namespace qzeno
