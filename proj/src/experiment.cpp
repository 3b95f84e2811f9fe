// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0

#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace qzeno {

namespace {

void collect_unknown_keys(const json_t& obj, const std::string& path,
                          const std::vector<std::string>& known,
                          std::vector<std::string>& unknown) {
  for (const auto& item : obj.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      unknown.push_back(path.empty() ? item.key() : path + "." + item.key());
  }
}

[[noreturn]] void bad_field(const std::string& field, const std::string& what) {
  throw ConfigError("spec field " + field + " " + what);
}

double get_number(const json_t& obj, const std::string& path, const char* key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) bad_field(path + "." + key, "must be a number");
  return v.get<double>();
}

long get_integer(const json_t& obj, const std::string& path, const char* key,
                 long fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) bad_field(path + "." + key, "must be an integer");
  return v.get<long>();
}

bool get_boolean(const json_t& obj, const std::string& path, const char* key,
                 bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) bad_field(path + "." + key, "must be true or false");
  return v.get<bool>();
}

std::string get_string(const json_t& obj, const std::string& path, const char* key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) bad_field(path + "." + key, "must be a string");
  return v.get<std::string>();
}

std::vector<double> get_number_array(const json_t& obj, const std::string& path,
                                     const char* key,
                                     const std::vector<double>& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_array()) bad_field(path + "." + key, "must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) bad_field(path + "." + key, "must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

const char* mode_name(TwoLevelMode mode) {
  switch (mode) {
    case TwoLevelMode::kAnalytic: return "analytic";
    case TwoLevelMode::kDephasingMc: return "dephasing_mc";
    default: return "collapse_mc";
  }
}

const char* kernel_name(KickKernel kernel) {
  return kernel == KickKernel::kSpectral ? "spectral" : "bessel_direct";
}

TwoLevelConfig parse_two_level(const json_t& obj, const SpecOverrides& overrides,
                               std::vector<std::string>& unknown) {
  const std::string path = "two_level";
  collect_unknown_keys(obj, path,
                       {"rabi_frequency", "measurement_interval", "n_steps",
                        "initial_state", "mode", "n_realizations"},
                       unknown);
  TwoLevelConfig c;
  c.rabi_frequency = get_number(obj, path, "rabi_frequency", c.rabi_frequency);
  c.measurement_interval =
      get_number(obj, path, "measurement_interval", c.measurement_interval);
  c.n_steps = get_integer(obj, path, "n_steps", c.n_steps);
  c.initial_state = static_cast<int>(get_integer(obj, path, "initial_state", c.initial_state));
  const std::string mode = get_string(obj, path, "mode", "analytic");
  if (mode == "analytic")
    c.mode = TwoLevelMode::kAnalytic;
  else if (mode == "dephasing_mc")
    c.mode = TwoLevelMode::kDephasingMc;
  else if (mode == "collapse_mc")
    c.mode = TwoLevelMode::kCollapseMc;
  else
    bad_field(path + ".mode", "must be one of analytic, dephasing_mc, collapse_mc");
  c.n_realizations = get_integer(obj, path, "n_realizations", c.n_realizations);
  if (overrides.realizations) c.n_realizations = *overrides.realizations;
  return c;
}

MeasurementSchedule parse_schedule(const json_t& parent, const std::string& parent_path,
                                   std::vector<std::string>& unknown) {
  MeasurementSchedule s;
  if (!parent.contains("schedule")) return s;
  const auto& v = parent.at("schedule");
  const std::string path = parent_path + ".schedule";
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    if (name == "all") {
      s.every_n_kicks = 1;
      s.measure_all = true;
    } else if (name == "none") {
      s.every_n_kicks = 0;
    } else {
      bad_field(path, "as a string must be \"all\" or \"none\"");
    }
    return s;
  }
  if (!v.is_object()) bad_field(path, "must be \"all\", \"none\", or an object");
  collect_unknown_keys(v, path, {"every_n_kicks", "measured_labels"}, unknown);
  s.every_n_kicks = get_integer(v, path, "every_n_kicks", 1);
  if (v.contains("measured_labels")) {
    const auto& ml = v.at("measured_labels");
    if (ml.is_string()) {
      if (ml.get<std::string>() != "all")
        bad_field(path + ".measured_labels", "as a string must be \"all\"");
      s.measure_all = true;
    } else if (ml.is_array()) {
      s.measure_all = false;
      for (const auto& e : ml) {
        if (!e.is_number_integer())
          bad_field(path + ".measured_labels", "must be \"all\" or an array of integers");
        s.measured_labels.push_back(e.get<int>());
      }
    } else {
      bad_field(path + ".measured_labels", "must be \"all\" or an array of integers");
    }
  }
  return s;
}

RotorConfig parse_rotor(const json_t& obj, const SpecOverrides& overrides,
                        LocalizationFitOptions& loc, BreakTimeOptions& bt,
                        std::vector<std::string>& unknown) {
  const std::string path = "rotor";
  collect_unknown_keys(obj, path,
                       {"kick_strength", "period", "h0_coefficients", "n_kicks",
                        "basis_size", "basis_override", "initial_state", "schedule",
                        "n_realizations", "kernel", "leakage_threshold", "analysis"},
                       unknown);
  RotorConfig c;
  c.kick_strength = get_number(obj, path, "kick_strength", c.kick_strength);
  c.period = get_number(obj, path, "period", c.period);
  c.h0_coefficients = get_number_array(obj, path, "h0_coefficients", c.h0_coefficients);
  c.n_kicks = get_integer(obj, path, "n_kicks", c.n_kicks);
  c.basis_size = static_cast<int>(get_integer(obj, path, "basis_size", c.basis_size));
  c.basis_override = get_boolean(obj, path, "basis_override", c.basis_override);
  c.initial_state = static_cast<int>(get_integer(obj, path, "initial_state", c.initial_state));
  c.schedule = parse_schedule(obj, path, unknown);
  c.n_realizations = get_integer(obj, path, "n_realizations", c.n_realizations);
  if (overrides.realizations) c.n_realizations = *overrides.realizations;
  const std::string kernel = get_string(obj, path, "kernel", "spectral");
  if (kernel == "spectral")
    c.kernel = KickKernel::kSpectral;
  else if (kernel == "bessel_direct")
    c.kernel = KickKernel::kBesselDirect;
  else
    bad_field(path + ".kernel", "must be spectral or bessel_direct");
  c.leakage_threshold = get_number(obj, path, "leakage_threshold", c.leakage_threshold);

  if (obj.contains("analysis")) {
    const auto& a = obj.at("analysis");
    const std::string apath = path + ".analysis";
    if (!a.is_object()) bad_field(apath, "must be an object");
    collect_unknown_keys(a, apath,
                         {"central_exclusion", "r2_floor", "min_tail_bins_per_side",
                          "break_threshold", "saturation_ratio"},
                         unknown);
    loc.central_exclusion = get_number(a, apath, "central_exclusion", loc.central_exclusion);
    loc.r2_floor = get_number(a, apath, "r2_floor", loc.r2_floor);
    loc.min_tail_bins_per_side = static_cast<std::size_t>(
        get_integer(a, apath, "min_tail_bins_per_side",
                    static_cast<long>(loc.min_tail_bins_per_side)));
    bt.threshold = get_number(a, apath, "break_threshold", bt.threshold);
    bt.saturation_ratio = get_number(a, apath, "saturation_ratio", bt.saturation_ratio);
  }
  return c;
}

SpectralModel parse_spectral_model(const json_t& parent, const std::string& parent_path,
                                   std::vector<std::string>& unknown) {
  SpectralModel m;
  if (!parent.contains("spectral_model")) return m;
  const auto& v = parent.at("spectral_model");
  const std::string path = parent_path + ".spectral_model";
  if (!v.is_object()) bad_field(path, "must be an object");
  collect_unknown_keys(v, path,
                       {"e_lower", "e_upper", "e_resonance", "coupling_sq", "density",
                        "table"},
                       unknown);
  m.e_lower = get_number(v, path, "e_lower", m.e_lower);
  m.e_upper = get_number(v, path, "e_upper", m.e_upper);
  m.e_resonance = get_number(v, path, "e_resonance", m.e_resonance);
  m.coupling_sq = get_number(v, path, "coupling_sq", m.coupling_sq);
  m.density = get_number(v, path, "density", m.density);
  if (v.contains("table")) {
    const auto& t = v.at("table");
    const std::string tpath = path + ".table";
    if (!t.is_object()) bad_field(tpath, "must be an object");
    collect_unknown_keys(t, tpath, {"energy", "coupling_sq", "density"}, unknown);
    m.table_energy = get_number_array(t, tpath, "energy", {});
    m.table_coupling_sq = get_number_array(t, tpath, "coupling_sq", {});
    m.table_density = get_number_array(t, tpath, "density", {});
  }
  return m;
}

DecayConfig parse_decay(const json_t& obj, std::vector<std::string>& unknown) {
  const std::string path = "decay";
  collect_unknown_keys(obj, path,
                       {"gamma", "g", "tau", "n_steps", "validity_threshold",
                        "quadrature_rel_tol", "spectral_model"},
                       unknown);
  DecayConfig c;
  c.gamma = get_number(obj, path, "gamma", c.gamma);
  c.g = get_number(obj, path, "g", c.g);
  c.tau = get_number(obj, path, "tau", c.tau);
  c.n_steps = get_integer(obj, path, "n_steps", c.n_steps);
  c.validity_threshold = get_number(obj, path, "validity_threshold", c.validity_threshold);
  c.quadrature_rel_tol =
      get_number(obj, path, "quadrature_rel_tol", c.quadrature_rel_tol);
  c.model = parse_spectral_model(obj, path, unknown);
  return c;
}

json_t schedule_to_json(const MeasurementSchedule& s) {
  json_t j;
  j["every_n_kicks"] = s.every_n_kicks;
  if (s.measure_all)
    j["measured_labels"] = "all";
  else
    j["measured_labels"] = s.measured_labels;
  return j;
}

json_t resolved_spec_json(const ExperimentSpec& spec) {
  json_t j;
  j["engine"] = spec.engine;
  j["master_seed"] = spec.master_seed;
  j["emit_reference_curves"] = spec.emit_reference_curves;
  if (spec.engine == "two_level") {
    const auto& c = spec.two_level;
    json_t e;
    e["rabi_frequency"] = c.rabi_frequency;
    e["measurement_interval"] = c.measurement_interval;
    e["n_steps"] = c.n_steps;
    e["initial_state"] = c.initial_state;
    e["mode"] = mode_name(c.mode);
    e["n_realizations"] = c.n_realizations;
    j["two_level"] = e;
  } else if (spec.engine == "rotor") {
    const auto& c = spec.rotor;
    json_t e;
    e["kick_strength"] = c.kick_strength;
    e["period"] = c.period;
    e["h0_coefficients"] = c.h0_coefficients;
    e["n_kicks"] = c.n_kicks;
    e["basis_size"] = c.resolved_basis_size();
    e["basis_override"] = c.basis_override;
    e["initial_state"] = c.initial_state;
    e["schedule"] = schedule_to_json(c.schedule);
    e["n_realizations"] = c.n_realizations;
    e["kernel"] = kernel_name(c.kernel);
    e["leakage_threshold"] = c.leakage_threshold;
    json_t a;
    a["central_exclusion"] = spec.localization_options.central_exclusion;
    a["r2_floor"] = spec.localization_options.r2_floor;
    a["min_tail_bins_per_side"] =
        static_cast<long>(spec.localization_options.min_tail_bins_per_side);
    a["break_threshold"] = spec.break_time_options.threshold;
    a["saturation_ratio"] = spec.break_time_options.saturation_ratio;
    e["analysis"] = a;
    j["rotor"] = e;
  } else {
    const auto& c = spec.decay;
    json_t e;
    e["gamma"] = c.gamma;
    e["g"] = c.g;
    e["tau"] = c.tau;
    e["n_steps"] = c.n_steps;
    e["validity_threshold"] = c.validity_threshold;
    e["quadrature_rel_tol"] = c.quadrature_rel_tol;
    json_t m;
    m["e_lower"] = c.model.e_lower;
    m["e_upper"] = c.model.e_upper;
    m["e_resonance"] = c.model.e_resonance;
    if (c.model.tabulated()) {
      json_t t;
      t["energy"] = c.model.table_energy;
      t["coupling_sq"] = c.model.table_coupling_sq;
      t["density"] = c.model.table_density;
      m["table"] = t;
    } else {
      m["coupling_sq"] = c.model.coupling_sq;
      m["density"] = c.model.density;
    }
    e["spectral_model"] = m;
    j["decay"] = e;
  }
  return j;
}

json_t fit_to_json(const FitResult& fit) {
  json_t j;
  j["estimate"] = fit.estimate;
  j["std_error"] = fit.std_error;
  j["window"] = json_t::array({fit.window_begin, fit.window_end});
  j["r2"] = fit.goodness;
  j["flagged"] = fit.flagged;
  if (fit.flagged) j["flag_reason"] = fit.flag_reason;
  return j;
}

std::string csv_row_end() { return "\n"; }

void add_summary_artifact(ExperimentOutput& out) {
  out.artifacts.push_back({"summary.json", out.summary.dump(2) + "\n"});
}

void run_two_level_experiment(const ExperimentSpec& spec, const std::string& spec_line,
                              int n_threads, ExperimentOutput& out) {
  const TwoLevelConfig& c = spec.two_level;
  const EnsembleResult res = run_two_level(c, spec.master_seed, n_threads);

  std::ostringstream csv;
  csv << "# two-level populations under repeated phase measurement\n";
  csv << "# spec: " << spec_line << "\n";
  csv << "# hbar = 1; t in units of 1/rabi_frequency scale, t = step * measurement_interval\n";
  csv << "step,t,p1_mean,p1_err,p2_mean,p2_err\n";
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    csv << i << ',' << format_double(res.times[i]) << ',' << format_double(res.p1_mean[i])
        << ',' << format_double(res.p1_err[i]) << ',' << format_double(res.p2_mean[i])
        << ',' << format_double(res.p2_err[i]) << csv_row_end();
  }
  out.artifacts.push_back({"timeseries.csv", csv.str()});

  if (spec.emit_reference_curves) {
    std::ostringstream ref;
    ref << "# coherent (measurement-free) populations for the same drive\n";
    ref << "# spec: " << spec_line << "\n";
    ref << "step,t,p1_coherent,p2_coherent\n";
    const double phi = c.phase_per_step();
    for (long j = 0; j <= c.n_steps; ++j) {
      const double s = std::sin(static_cast<double>(j) * phi);
      const double p_other = s * s;
      const double p_same = 1.0 - p_other;
      const double p1 = c.initial_state == 0 ? p_same : p_other;
      ref << j << ',' << format_double(static_cast<double>(j) * c.measurement_interval)
          << ',' << format_double(p1) << ',' << format_double(1.0 - p1) << csv_row_end();
    }
    out.artifacts.push_back({"reference.csv", ref.str()});
  }

  const Mat2 closed = measured_power(c.phase_per_step(), c.n_steps);
  const double p1_0 = c.initial_state == 0 ? 1.0 : 0.0;
  const double p2_closed = closed[2] * p1_0 + closed[3] * (1.0 - p1_0);

  json_t s;
  s["engine"] = "two_level";
  s["master_seed"] = spec.master_seed;
  s["mode"] = mode_name(c.mode);
  s["n_realizations"] = res.n_realizations;
  s["p1_final"] = res.p1_mean.back();
  s["p1_final_err"] = res.p1_err.back();
  s["p2_final"] = res.p2_mean.back();
  s["p2_final_err"] = res.p2_err.back();
  s["p2_final_closed_form"] = p2_closed;
  s["warnings"] = res.warnings;
  s["spec"] = spec.resolved;
  out.summary = s;
  out.warnings = res.warnings;
  add_summary_artifact(out);
}

void run_rotor_experiment(const ExperimentSpec& spec, const std::string& spec_line,
                          int n_threads, ExperimentOutput& out) {
  const RotorConfig& c = spec.rotor;
  const EnsembleResult res = run_rotor(c, spec.master_seed, n_threads);
  const double b_classical =
      c.kick_strength * c.kick_strength / (4.0 * c.period);

  std::ostringstream csv;
  csv << "# kicked-rotor ensemble time series\n";
  csv << "# spec: " << spec_line << "\n";
  csv << "# hbar = 1; energy = <(m - m0)^2>; B = <(Delta m)^2>/(2 t)\n";
  csv << "kick,t,energy_mean,energy_err,participation,leakage\n";
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    csv << i << ',' << format_double(res.times[i]) << ','
        << format_double(res.energy_mean[i]) << ',' << format_double(res.energy_err[i])
        << ',' << format_double(res.participation_mean[i]) << ','
        << format_double(res.leakage_mean[i]) << csv_row_end();
  }
  out.artifacts.push_back({"timeseries.csv", csv.str()});

  std::ostringstream prof;
  prof << "# momentum-space probability profile: ensemble mean at the last kick\n";
  prof << "# (p_final) and time average over the last quarter of kicks (p_tail)\n";
  prof << "# spec: " << spec_line << "\n";
  prof << "m,p_final,p_tail\n";
  for (std::size_t i = 0; i < res.final_profile.probabilities.size(); ++i) {
    prof << res.final_profile.label_of(i) << ','
         << format_double(res.final_profile.probabilities[i]) << ','
         << format_double(res.tail_profile.probabilities[i]) << csv_row_end();
  }
  out.artifacts.push_back({"profile.csv", prof.str()});

  if (spec.emit_reference_curves) {
    std::ostringstream ref;
    ref << "# classical diffusion reference: energy = 2 * B_classical * t, B_classical = k^2/(4 tau)\n";
    ref << "# spec: " << spec_line << "\n";
    ref << "kick,t,classical_energy\n";
    for (std::size_t i = 0; i < res.times.size(); ++i) {
      ref << i << ',' << format_double(res.times[i]) << ','
          << format_double(2.0 * b_classical * res.times[i]) << csv_row_end();
    }
    out.artifacts.push_back({"reference.csv", ref.str()});
  }

  json_t s;
  s["engine"] = "rotor";
  s["master_seed"] = spec.master_seed;
  s["n_realizations"] = res.n_realizations;
  s["b_classical"] = b_classical;
  s["convention"] = "B = <Dm^2>/(2t)";

  try {
    s["B"] = fit_to_json(diffusion_fit(res, c.period));
  } catch (const FitError& e) {
    s["B"] = json_t{{"error", e.what()}};
  }

  LocalizationFitOptions loc = spec.localization_options;
  const int basis_n = c.resolved_basis_size();
  const int edge_bins = std::max(1, basis_n / 40);
  loc.floor = 10.0 * res.leakage_max / static_cast<double>(2 * edge_bins);
  try {
    s["lambda"] = fit_to_json(localization_fit(res.tail_profile, res.initial_label, loc));
  } catch (const FitError& e) {
    s["lambda"] = json_t{{"error", e.what()}};
  }

  try {
    s["break_time"] =
        fit_to_json(break_time_estimate(res, b_classical, spec.break_time_options));
  } catch (const FitError& e) {
    s["break_time"] = json_t{{"error", e.what()}};
  }

  s["energy_final"] = res.energy_mean.back();
  s["energy_final_err"] = res.energy_err.back();
  s["participation_final"] = res.participation_mean.back();
  s["leakage_max"] = res.leakage_max;
  s["warnings"] = res.warnings;
  s["spec"] = spec.resolved;
  out.summary = s;
  out.warnings = res.warnings;
  add_summary_artifact(out);
}

void run_decay_experiment(const ExperimentSpec& spec, const std::string& spec_line,
                          ExperimentOutput& out) {
  const DecayConfig& c = spec.decay;
  const DecayResult res = run_decay(c);

  std::ostringstream csv;
  csv << "# short-time decay probability from the band integral\n";
  csv << "# spec: " << spec_line << "\n";
  csv << "# hbar = 1; quadratic_reference = g_model * t^2\n";
  csv << "t,p_decay,p_survival,quadratic_reference\n";
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    csv << format_double(res.times[i]) << ',' << format_double(res.p_decay[i]) << ','
        << format_double(res.p_survival[i]) << ','
        << format_double(res.quadratic_reference[i]) << csv_row_end();
  }
  out.artifacts.push_back({"timeseries.csv", csv.str()});

  if (spec.emit_reference_curves) {
    std::ostringstream ref;
    ref << "# repeated-measurement survival: product law vs exponential\n";
    ref << "# spec: " << spec_line << "\n";
    ref << "step,t,survival_product,survival_exponential\n";
    const double x = c.gamma * c.tau;
    for (long j = 0; j <= c.n_steps; ++j) {
      const double t = static_cast<double>(j) * c.tau;
      const double product = std::exp(static_cast<double>(j) * std::log1p(-x));
      ref << j << ',' << format_double(t) << ',' << format_double(product) << ','
          << format_double(std::exp(-c.gamma * t)) << csv_row_end();
    }
    out.artifacts.push_back({"reference.csv", ref.str()});
  }

  json_t s;
  s["engine"] = "decay";
  s["master_seed"] = spec.master_seed;
  s["g_model"] = res.g_model;
  s["survival_linear"] = json_t{{"product_law", res.linear.product_law},
                                {"exponential", res.linear.companion},
                                {"validity_warning", res.linear.validity_warning}};
  s["survival_quadratic"] = json_t{{"product_law", res.quadratic.product_law},
                                   {"exponential", res.quadratic.companion},
                                   {"validity_warning", res.quadratic.validity_warning}};
  s["p_decay_final"] = res.p_decay.back();
  s["warnings"] = res.warnings;
  s["spec"] = spec.resolved;
  out.summary = s;
  out.warnings = res.warnings;
  add_summary_artifact(out);
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

ExperimentSpec parse_spec(const std::string& text, const SpecOverrides& overrides) {
  json_t root;
  try {
    root = json_t::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("spec is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("spec must be a JSON object");

  ExperimentSpec spec;
  if (!root.contains("engine"))
    throw ConfigError("spec.engine is required (two_level | rotor | decay)");
  if (!root.at("engine").is_string())
    throw ConfigError("spec.engine must be a string (two_level | rotor | decay)");
  spec.engine = root.at("engine").get<std::string>();
  if (spec.engine != "two_level" && spec.engine != "rotor" && spec.engine != "decay")
    throw ConfigError("spec.engine must be one of two_level, rotor, decay (got \"" +
                      spec.engine + "\")");

  for (const char* other : {"two_level", "rotor", "decay"}) {
    if (other != spec.engine && root.contains(other))
      throw ConfigError(std::string("spec contains the config block \"") + other +
                        "\" but engine is \"" + spec.engine +
                        "\"; exactly one engine block is allowed");
  }

  if (overrides.seed) {
    spec.master_seed = *overrides.seed;
  } else {
    if (!root.contains("master_seed"))
      throw ConfigError(
          "spec.master_seed is required (or pass --seed); runs are never seeded from "
          "the clock");
    const auto& seed = root.at("master_seed");
    if (!seed.is_number_unsigned())
      throw ConfigError("spec.master_seed must be an unsigned 64-bit integer");
    spec.master_seed = seed.get<std::uint64_t>();
  }

  std::vector<std::string> unknown;
  collect_unknown_keys(root, "",
                       {"engine", "master_seed", "emit_reference_curves", spec.engine},
                       unknown);
  spec.emit_reference_curves =
      get_boolean(root, "spec", "emit_reference_curves", spec.emit_reference_curves);

  if (!root.contains(spec.engine))
    throw ConfigError("spec is missing the \"" + spec.engine + "\" config block");
  const auto& block = root.at(spec.engine);
  if (!block.is_object())
    throw ConfigError("spec." + spec.engine + " must be an object");

  if (spec.engine == "two_level") {
    spec.two_level = parse_two_level(block, overrides, unknown);
  } else if (spec.engine == "rotor") {
    spec.rotor = parse_rotor(block, overrides, spec.localization_options,
                             spec.break_time_options, unknown);
  } else {
    spec.decay = parse_decay(block, unknown);
  }

  if (!unknown.empty()) {
    std::ostringstream os;
    os << "spec contains unknown keys: ";
    for (std::size_t i = 0; i < unknown.size(); ++i) {
      if (i) os << ", ";
      os << unknown[i];
    }
    throw ConfigError(os.str());
  }

  if (spec.engine == "two_level") spec.two_level.validate();
  if (spec.engine == "rotor") spec.rotor.validate();
  if (spec.engine == "decay") spec.decay.validate();

  spec.resolved = resolved_spec_json(spec);
  return spec;
}

ExperimentOutput run_experiment(const ExperimentSpec& spec, int n_threads) {
  ExperimentOutput out;
  const std::string spec_line = spec.resolved.dump();
  if (spec.engine == "two_level") {
    run_two_level_experiment(spec, spec_line, n_threads, out);
  } else if (spec.engine == "rotor") {
    run_rotor_experiment(spec, spec_line, n_threads, out);
  } else if (spec.engine == "decay") {
    run_decay_experiment(spec, spec_line, out);
  } else {
    throw ConfigError("unknown engine \"" + spec.engine + "\"");
  }
  return out;
}

void write_artifacts(const ExperimentOutput& output, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory " + out_dir + ": " +
                             ec.message());
  for (const auto& artifact : output.artifacts) {
    const fs::path path = fs::path(out_dir) / artifact.name;
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
    file.write(artifact.content.data(),
               static_cast<std::streamsize>(artifact.content.size()));
    if (!file) throw std::runtime_error("failed writing " + path.string());
  }
}

}  // namespace qzeno
