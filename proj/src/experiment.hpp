// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0
//
// Experiment orchestration: JSON spec parsing with strict unknown-key
// rejection, engine dispatch, and deterministic artifact rendering. Thread
// count and output paths are runtime parameters, never part of the spec, so
// artifacts are byte-identical for any parallelism.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "decay.hpp"
#include "rotor.hpp"
#include "two_level.hpp"

namespace qzeno {

using json_t = nlohmann::ordered_json;

struct SpecOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> realizations;
};

struct ExperimentSpec {
  std::string engine;  // "two_level" | "rotor" | "decay"
  std::uint64_t master_seed = 0;
  bool emit_reference_curves = true;

  TwoLevelConfig two_level;
  RotorConfig rotor;
  DecayConfig decay;
  LocalizationFitOptions localization_options;
  BreakTimeOptions break_time_options;

  // Fully resolved spec (defaults materialized); echoed into every artifact.
  json_t resolved;
};

// Parses and validates a JSON spec; throws ConfigError with a message that
// names every unknown key or the violated bound. Overrides are applied
// before validation and appear in the resolved echo.
ExperimentSpec parse_spec(const std::string& text, const SpecOverrides& overrides = {});

struct Artifact {
  std::string name;     // e.g. "timeseries.csv"
  std::string content;  // complete file body
};

struct ExperimentOutput {
  std::vector<Artifact> artifacts;
  json_t summary;
  std::vector<std::string> warnings;
};

ExperimentOutput run_experiment(const ExperimentSpec& spec, int n_threads = 1);

// Writes every artifact into out_dir (created if needed). Binary streams,
// '\n' line endings.
void write_artifacts(const ExperimentOutput& output, const std::string& out_dir);

// "%.17g": enough digits to round-trip any double.
std::string format_double(double value);

}  // namespace qzeno
