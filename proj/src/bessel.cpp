// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0

#include "bessel.hpp"

#include <cmath>
#include <cstdint>

#include "errors.hpp"

namespace qzeno {

namespace {

// Start the downward recurrence well above both the target order and the
// turning point m ~ x; the usual rule of thumb with a safety margin.
int miller_start_order(double ax, int m_max) {
  const double m = static_cast<double>(m_max);
  const double guess = std::max(m, ax) + 15.0 * std::sqrt(std::max(m, ax)) + 20.0;
  return static_cast<int>(guess) | 1;
}

}  // namespace

std::vector<double> bessel_j_array(double x, int m_max) {
  if (m_max < 0) throw DomainError("bessel_j_array requires m_max >= 0");
  if (!std::isfinite(x)) throw DomainError("bessel_j_array requires finite x");

  const double ax = std::fabs(x);
  std::vector<double> out(static_cast<std::size_t>(m_max) + 1, 0.0);

  if (ax < 1e-8) {
    // Leading series term is enough at this scale: J_m(x) ~ (x/2)^m / m!.
    double term = 1.0;
    out[0] = 1.0 - 0.25 * x * x;
    for (int m = 1; m <= m_max; ++m) {
      term *= 0.5 * x / static_cast<double>(m);
      out[static_cast<std::size_t>(m)] = term;
    }
    return out;
  }

  const int start = miller_start_order(ax, m_max);
  // Downward recurrence overflows for large start orders, so rescale by
  // 2^-500 whenever the iterate passes 2^500 and remember how many times
  // each stored value has been rescaled since it was recorded.
  constexpr double kBig = 0x1p500;
  constexpr double kBigInv = 0x1p-500;

  std::vector<int> scale_at_store(static_cast<std::size_t>(m_max) + 1, 0);
  int scale_total = 0;

  double jp = 0.0;          // J_{m+1} iterate
  double jc = 1e-30;        // J_m iterate, arbitrary seed
  double sum = 0.0;         // J_0 + 2 * sum_{even m >= 2} J_m, built on the fly
  int sum_scale = 0;

  for (int m = start; m >= 0; --m) {
    const double jm = 2.0 * static_cast<double>(m + 1) / ax * jc - jp;
    jp = jc;
    jc = jm;
    if (std::fabs(jc) > kBig) {
      jc *= kBigInv;
      jp *= kBigInv;
      sum *= kBigInv;
      ++scale_total;
    }
    if (m <= m_max) {
      out[static_cast<std::size_t>(m)] = jc;
      scale_at_store[static_cast<std::size_t>(m)] = scale_total;
    }
    if (m > 0 && (m % 2) == 0) {
      sum += 2.0 * jc;
      sum_scale = scale_total;
    }
  }
  sum += jc;  // add J_0; both now carry scale_total rescalings
  sum_scale = scale_total;
  (void)sum_scale;

  if (sum == 0.0 || !std::isfinite(sum))
    throw NumericError("bessel_j_array: normalization sum degenerate");

  for (int m = 0; m <= m_max; ++m) {
    const int lag = scale_total - scale_at_store[static_cast<std::size_t>(m)];
    out[static_cast<std::size_t>(m)] =
        std::ldexp(out[static_cast<std::size_t>(m)] / sum, -500 * lag);
  }

  if (x < 0.0) {
    for (int m = 1; m <= m_max; m += 2) out[static_cast<std::size_t>(m)] = -out[static_cast<std::size_t>(m)];
  }
  return out;
}

double bessel_j(int n, double x) {
  int an = n;
  double sign = 1.0;
  if (an < 0) {
    an = -an;
    if (an % 2 == 1) sign = -sign;
  }
  if (x < 0.0 && an % 2 == 1) sign = -sign;
  const auto vals = bessel_j_array(std::fabs(x), an);
  return sign * vals[static_cast<std::size_t>(an)];
}

int bessel_default_half_width(double k) {
  const double ak = std::fabs(k);
  return static_cast<int>(std::ceil(ak + 8.0 * std::cbrt(ak) + 10.0));
}

std::vector<double> bessel_kernel(double k, int half_width) {
  if (half_width < 0) throw DomainError("bessel_kernel requires half_width >= 0");
  const auto pos = bessel_j_array(std::fabs(k), half_width);
  std::vector<double> kernel(2 * static_cast<std::size_t>(half_width) + 1, 0.0);
  const bool neg = k < 0.0;
  for (int m = -half_width; m <= half_width; ++m) {
    const int am = m < 0 ? -m : m;
    double v = pos[static_cast<std::size_t>(am)];
    if (m < 0 && am % 2 == 1) v = -v;
    if (neg && am % 2 == 1) v = -v;
    kernel[static_cast<std::size_t>(m + half_width)] = v;
  }
  return kernel;
}

}  // namespace qzeno
