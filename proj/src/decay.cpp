// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0

#include "decay.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "errors.hpp"

namespace qzeno {

namespace {

double interp_clamped(const std::vector<double>& xs, const std::vector<double>& ys,
                      double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + w * (ys[hi] - ys[lo]);
}

// sin^2(dt/2) / (d/2)^2 with the removable singularity at d -> 0 filled in.
double transition_kernel(double delta, double t) {
  const double u = 0.5 * delta * t;
  if (std::fabs(u) < 1e-6) {
    return t * t * (1.0 - u * u / 3.0);
  }
  const double s = std::sin(u);
  const double half_d = 0.5 * delta;
  return s * s / (half_d * half_d);
}

struct QuadratureState {
  long evals = 0;
  double worst_panel_error = 0.0;
  bool converged = true;
};

constexpr long kQuadratureEvalBudget = 2'000'000;

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa,
                     double b, double fb, double m, double fm, double whole,
                     double tol, int depth, QuadratureState& st) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  st.evals += 2;
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  const double err = (left + right - whole) / 15.0;
  if (std::fabs(err) <= tol || depth >= 48 || st.evals > kQuadratureEvalBudget) {
    if (std::fabs(err) > tol) {
      st.converged = false;
      st.worst_panel_error = std::max(st.worst_panel_error, std::fabs(err));
    }
    return left + right + err;
  }
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1, st) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1, st);
}

// Adaptive Simpson over [a, b], pre-split into panels no wider than the
// integrand's oscillation scale so the error estimate is trustworthy.
double adaptive_integral(const std::function<double(double)>& f, double a, double b,
                         double oscillation_scale, double rel_tol,
                         QuadratureState& st) {
  const double width = b - a;
  long panels = 4;
  if (oscillation_scale > 0.0 && std::isfinite(oscillation_scale)) {
    panels = std::max<long>(panels, static_cast<long>(std::ceil(width / oscillation_scale)));
  }
  panels = std::min<long>(panels, 100000);

  // First pass: coarse total to turn the relative tolerance into an absolute
  // budget distributed over panels by width.
  double coarse = 0.0;
  std::vector<double> edges(static_cast<std::size_t>(panels) + 1);
  for (long i = 0; i <= panels; ++i)
    edges[static_cast<std::size_t>(i)] =
        a + width * static_cast<double>(i) / static_cast<double>(panels);
  std::vector<double> fe(static_cast<std::size_t>(panels) + 1);
  for (long i = 0; i <= panels; ++i) fe[static_cast<std::size_t>(i)] = f(edges[static_cast<std::size_t>(i)]);
  st.evals += panels + 1;
  for (long i = 0; i < panels; ++i) {
    const double pa = edges[static_cast<std::size_t>(i)];
    const double pb = edges[static_cast<std::size_t>(i) + 1];
    const double pm = 0.5 * (pa + pb);
    coarse += simpson(pa, pb, fe[static_cast<std::size_t>(i)], f(pm),
                      fe[static_cast<std::size_t>(i) + 1]);
  }
  st.evals += panels;

  const double abs_tol = rel_tol * std::max(std::fabs(coarse), 1e-300);
  double total = 0.0;
  for (long i = 0; i < panels; ++i) {
    const double pa = edges[static_cast<std::size_t>(i)];
    const double pb = edges[static_cast<std::size_t>(i) + 1];
    const double pm = 0.5 * (pa + pb);
    const double fpa = fe[static_cast<std::size_t>(i)];
    const double fpb = fe[static_cast<std::size_t>(i) + 1];
    const double fpm = f(pm);
    ++st.evals;
    const double whole = simpson(pa, pb, fpa, fpm, fpb);
    const double panel_tol = abs_tol * (pb - pa) / width;
    total += adaptive_step(f, pa, fpa, pb, fpb, pm, fpm, whole, panel_tol, 0, st);
  }
  return total;
}

}  // namespace

void SpectralModel::validate() const {
  if (!(e_upper > e_lower))
    throw ConfigError("spectral model requires e_upper > e_lower");
  if (!(e_resonance >= e_lower && e_resonance <= e_upper))
    throw ConfigError("spectral model requires e_lower <= e_resonance <= e_upper");
  if (tabulated()) {
    if (table_energy.size() < 2)
      throw ConfigError("tabulated spectral model needs at least 2 points");
    if (table_coupling_sq.size() != table_energy.size() ||
        table_density.size() != table_energy.size())
      throw ConfigError("tabulated spectral model columns must have equal length");
    for (std::size_t i = 1; i < table_energy.size(); ++i)
      if (!(table_energy[i] > table_energy[i - 1]))
        throw ConfigError("tabulated energies must be strictly increasing");
    for (std::size_t i = 0; i < table_energy.size(); ++i)
      if (table_coupling_sq[i] < 0.0 || table_density[i] < 0.0)
        throw ConfigError("tabulated coupling_sq and density must be >= 0");
  } else {
    if (coupling_sq < 0.0) throw ConfigError("coupling_sq must be >= 0");
    if (density < 0.0) throw ConfigError("density must be >= 0");
  }
}

double SpectralModel::coupling_sq_at(double e) const {
  if (!tabulated()) return coupling_sq;
  return interp_clamped(table_energy, table_coupling_sq, e);
}

double SpectralModel::density_at(double e) const {
  if (!tabulated()) return density;
  return interp_clamped(table_energy, table_density, e);
}

SurvivalResult survival_linear(double gamma, double tau, long n) {
  if (gamma < 0.0) throw DomainError("survival_linear requires gamma >= 0");
  if (!(tau > 0.0)) throw DomainError("survival_linear requires tau > 0");
  if (n < 1) throw DomainError("survival_linear requires n >= 1");
  const double x = gamma * tau;
  if (x >= 1.0) throw DomainError("survival_linear requires gamma*tau < 1");
  SurvivalResult r;
  r.product_law = std::exp(static_cast<double>(n) * std::log1p(-x));
  r.companion = std::exp(-gamma * static_cast<double>(n) * tau);
  r.validity_warning = x > 0.1;
  return r;
}

SurvivalResult survival_quadratic(double g, double tau, long n) {
  if (g < 0.0) throw DomainError("survival_quadratic requires g >= 0");
  if (!(tau > 0.0)) throw DomainError("survival_quadratic requires tau > 0");
  if (n < 1) throw DomainError("survival_quadratic requires n >= 1");
  const double x = g * tau * tau;
  if (x >= 1.0) throw DomainError("survival_quadratic requires g*tau^2 < 1");
  SurvivalResult r;
  const double t = static_cast<double>(n) * tau;
  r.product_law = std::exp(static_cast<double>(n) * std::log1p(-x));
  r.companion = std::exp(-g * t * t / static_cast<double>(n));
  r.validity_warning = x > 0.1;
  return r;
}

double decay_probability_integral(const SpectralModel& model, double t,
                                  double rel_tol) {
  model.validate();
  if (t < 0.0) throw DomainError("decay_probability_integral requires t >= 0");
  if (t == 0.0) return 0.0;

  const double e0 = model.e_resonance;
  const auto integrand = [&](double e) {
    return model.coupling_sq_at(e) * model.density_at(e) * transition_kernel(e - e0, t);
  };

  QuadratureState st;
  const double oscillation_scale = 2.0 * M_PI / t;
  const double value = adaptive_integral(integrand, model.e_lower, model.e_upper,
                                         oscillation_scale, rel_tol, st);
  if (!st.converged) {
    std::ostringstream os;
    os << "decay integral did not converge to relative tolerance " << rel_tol
       << "; worst panel error " << st.worst_panel_error << " after " << st.evals
       << " evaluations";
    throw NumericError(os.str());
  }
  if (!(value >= 0.0)) {
    // Tiny negative values can only come from roundoff on a vanishing result.
    if (value > -1e-12) return 0.0;
    throw NumericError("decay integral returned a negative probability");
  }
  return value;
}

double zeno_time_coefficient(const SpectralModel& model) {
  model.validate();
  return (model.e_upper - model.e_lower) * model.coupling_sq_at(model.e_resonance) *
         model.density_at(model.e_resonance);
}

void DecayConfig::validate() const {
  if (gamma < 0.0) throw ConfigError("decay.gamma must be >= 0");
  if (g < 0.0) throw ConfigError("decay.g must be >= 0");
  if (!(tau > 0.0)) throw ConfigError("decay.tau must be > 0");
  if (n_steps < 1) throw ConfigError("decay.n_steps must be >= 1");
  if (!(validity_threshold > 0.0))
    throw ConfigError("decay.validity_threshold must be > 0");
  if (!(quadrature_rel_tol > 0.0 && quadrature_rel_tol < 1.0))
    throw ConfigError("decay.quadrature_rel_tol must be in (0, 1)");
  model.validate();
}

DecayResult run_decay(const DecayConfig& config) {
  config.validate();
  DecayResult res;
  res.g_model = zeno_time_coefficient(config.model);
  res.linear = survival_linear(config.gamma, config.tau, config.n_steps);
  res.quadratic = survival_quadratic(config.g, config.tau, config.n_steps);
  if (res.linear.validity_warning) {
    std::ostringstream os;
    os << "gamma*tau = " << config.gamma * config.tau
       << " exceeds 0.1; the product law is outside its small-step regime";
    res.warnings.push_back(os.str());
  }
  if (res.quadratic.validity_warning) {
    std::ostringstream os;
    os << "g*tau^2 = " << config.g * config.tau * config.tau
       << " exceeds 0.1; the quadratic product law is outside its small-step regime";
    res.warnings.push_back(os.str());
  }

  const long n = config.n_steps;
  res.times.resize(static_cast<std::size_t>(n) + 1);
  res.p_decay.resize(res.times.size());
  res.p_survival.resize(res.times.size());
  res.quadratic_reference.resize(res.times.size());
  bool perturbative = true;
  for (long j = 0; j <= n; ++j) {
    const double t = static_cast<double>(j) * config.tau;
    const double pd = decay_probability_integral(config.model, t, config.quadrature_rel_tol);
    res.times[static_cast<std::size_t>(j)] = t;
    res.p_decay[static_cast<std::size_t>(j)] = pd;
    res.p_survival[static_cast<std::size_t>(j)] = 1.0 - pd;
    res.quadratic_reference[static_cast<std::size_t>(j)] = res.g_model * t * t;
    if (pd >= config.validity_threshold && perturbative) {
      perturbative = false;
      std::ostringstream os;
      os << "P_d(t=" << t << ") = " << pd << " reaches the validity threshold "
         << config.validity_threshold << "; later rows are outside perturbation theory";
      res.warnings.push_back(os.str());
    }
  }
  return res;
}

}  // namespace qzeno
