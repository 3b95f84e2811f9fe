// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0
//
// Bessel functions of the first kind, integer order, computed by Miller's
// downward recurrence. Orders 0..m_max are produced in one sweep, which is
// what the kick kernel needs.

#pragma once

#include <vector>

namespace qzeno {

// J_0(x) .. J_{m_max}(x). Accurate to ~1e-15 relative for moderate x.
std::vector<double> bessel_j_array(double x, int m_max);

// Single order, negative n and negative x handled via symmetry.
double bessel_j(int n, double x);

// Half-width w such that |J_m(k)| < 1e-14 for |m| > w.
int bessel_default_half_width(double k);

// Kernel J_{-w}(k) .. J_{w}(k) as a dense array of length 2*w+1; index
// w + m holds J_m(k).
std::vector<double> bessel_kernel(double k, int half_width);

}  // namespace qzeno
