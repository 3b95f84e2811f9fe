// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0

#include "qzeno.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <string>

#include "errors.hpp"
#include "experiment.hpp"
#include "verify.hpp"

namespace {

thread_local std::string g_thread_error;

void set_thread_error(const std::string& message) { g_thread_error = message; }

}  // namespace

struct qz_run {
  std::string spec_text;
  qzeno::SpecOverrides overrides;
  int threads = 1;
  std::string engine;
  std::string error;
  bool executed = false;
  qzeno::ExperimentOutput output;
};

namespace {

qz_status classify(const std::exception& e) {
  if (dynamic_cast<const qzeno::ConfigError*>(&e)) return QZ_ERROR_CONFIG;
  if (dynamic_cast<const qzeno::DomainError*>(&e)) return QZ_ERROR_DOMAIN;
  if (dynamic_cast<const qzeno::NumericError*>(&e)) return QZ_ERROR_NUMERIC;
  if (dynamic_cast<const qzeno::FitError*>(&e)) return QZ_ERROR_FIT;
  return QZ_ERROR_INTERNAL;
}

qz_status fail(qz_run* run, qz_status status, const std::string& message) {
  if (run) run->error = message;
  set_thread_error(message);
  return status;
}

}  // namespace

extern "C" {

const char* qz_version(void) { return "0.1.0"; }

const char* qz_status_name(qz_status status) {
  switch (status) {
    case QZ_OK: return "QZ_OK";
    case QZ_ERROR_INVALID_ARGUMENT: return "QZ_ERROR_INVALID_ARGUMENT";
    case QZ_ERROR_CONFIG: return "QZ_ERROR_CONFIG";
    case QZ_ERROR_DOMAIN: return "QZ_ERROR_DOMAIN";
    case QZ_ERROR_NUMERIC: return "QZ_ERROR_NUMERIC";
    case QZ_ERROR_FIT: return "QZ_ERROR_FIT";
    case QZ_ERROR_IO: return "QZ_ERROR_IO";
    default: return "QZ_ERROR_INTERNAL";
  }
}

const char* qz_last_error(void) { return g_thread_error.c_str(); }

const char* qz_run_error_message(const qz_run* run) {
  return run ? run->error.c_str() : "null run";
}

qz_status qz_run_create(const char* spec_json, qz_run** run) {
  if (run) *run = nullptr;
  if (!spec_json || !run)
    return fail(nullptr, QZ_ERROR_INVALID_ARGUMENT, "qz_run_create: null argument");
  try {
    auto owned = std::make_unique<qz_run>();
    owned->spec_text = spec_json;
    const qzeno::ExperimentSpec spec = qzeno::parse_spec(owned->spec_text);
    owned->engine = spec.engine;
    *run = owned.release();
    set_thread_error("");
    return QZ_OK;
  } catch (const std::exception& e) {
    return fail(nullptr, classify(e), e.what());
  }
}

const char* qz_run_engine_name(const qz_run* run) {
  return run ? run->engine.c_str() : "";
}

qz_status qz_run_set_seed(qz_run* run, uint64_t seed) {
  if (!run) return fail(nullptr, QZ_ERROR_INVALID_ARGUMENT, "null run");
  run->overrides.seed = seed;
  return QZ_OK;
}

qz_status qz_run_set_realizations(qz_run* run, long n) {
  if (!run) return fail(nullptr, QZ_ERROR_INVALID_ARGUMENT, "null run");
  if (n < 1) return fail(run, QZ_ERROR_INVALID_ARGUMENT, "realizations must be >= 1");
  run->overrides.realizations = n;
  return QZ_OK;
}

qz_status qz_run_set_threads(qz_run* run, int n) {
  if (!run) return fail(nullptr, QZ_ERROR_INVALID_ARGUMENT, "null run");
  if (n < 0) return fail(run, QZ_ERROR_INVALID_ARGUMENT, "threads must be >= 0");
  run->threads = n;
  return QZ_OK;
}

qz_status qz_run_execute(qz_run* run) {
  if (!run) return fail(nullptr, QZ_ERROR_INVALID_ARGUMENT, "null run");
  try {
    const qzeno::ExperimentSpec spec = qzeno::parse_spec(run->spec_text, run->overrides);
    run->output = qzeno::run_experiment(spec, run->threads);
    run->executed = true;
    run->error.clear();
    return QZ_OK;
  } catch (const std::exception& e) {
    run->executed = false;
    return fail(run, classify(e), e.what());
  }
}

long qz_run_artifact_count(const qz_run* run) {
  if (!run || !run->executed) return 0;
  return static_cast<long>(run->output.artifacts.size());
}

const char* qz_run_artifact_name(const qz_run* run, long index) {
  if (!run || !run->executed) return nullptr;
  if (index < 0 || index >= static_cast<long>(run->output.artifacts.size()))
    return nullptr;
  return run->output.artifacts[static_cast<std::size_t>(index)].name.c_str();
}

const char* qz_run_artifact_content(const qz_run* run, long index) {
  if (!run || !run->executed) return nullptr;
  if (index < 0 || index >= static_cast<long>(run->output.artifacts.size()))
    return nullptr;
  return run->output.artifacts[static_cast<std::size_t>(index)].content.c_str();
}

qz_status qz_run_write_artifacts(qz_run* run, const char* out_dir) {
  if (!run) return fail(nullptr, QZ_ERROR_INVALID_ARGUMENT, "null run");
  if (!out_dir) return fail(run, QZ_ERROR_INVALID_ARGUMENT, "null out_dir");
  if (!run->executed)
    return fail(run, QZ_ERROR_INVALID_ARGUMENT, "execute the run before writing artifacts");
  try {
    qzeno::write_artifacts(run->output, out_dir);
    return QZ_OK;
  } catch (const std::exception& e) {
    return fail(run, QZ_ERROR_IO, e.what());
  }
}

qz_status qz_run_summary_value(qz_run* run, const char* path, double* value) {
  if (!run) return fail(nullptr, QZ_ERROR_INVALID_ARGUMENT, "null run");
  if (!path || !value)
    return fail(run, QZ_ERROR_INVALID_ARGUMENT, "null path or value");
  if (!run->executed)
    return fail(run, QZ_ERROR_INVALID_ARGUMENT, "execute the run before reading the summary");

  const qzeno::json_t* node = &run->output.summary;
  std::string segment;
  const std::string full(path);
  std::size_t pos = 0;
  while (pos <= full.size()) {
    const std::size_t dot = full.find('.', pos);
    segment = full.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (segment.empty())
      return fail(run, QZ_ERROR_INVALID_ARGUMENT,
                  "empty segment in summary path \"" + full + "\"");
    if (node->is_object() && node->contains(segment)) {
      node = &node->at(segment);
    } else if (node->is_array()) {
      char* end = nullptr;
      const long idx = std::strtol(segment.c_str(), &end, 10);
      if (!end || *end != '\0' || idx < 0 ||
          idx >= static_cast<long>(node->size()))
        return fail(run, QZ_ERROR_INVALID_ARGUMENT,
                    "bad array index \"" + segment + "\" in summary path");
      node = &(*node)[static_cast<std::size_t>(idx)];
    } else {
      return fail(run, QZ_ERROR_INVALID_ARGUMENT,
                  "summary has no entry \"" + segment + "\" (path \"" + full + "\")");
    }
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }

  if (node->is_number()) {
    *value = node->get<double>();
    return QZ_OK;
  }
  if (node->is_boolean()) {
    *value = node->get<bool>() ? 1.0 : 0.0;
    return QZ_OK;
  }
  return fail(run, QZ_ERROR_INVALID_ARGUMENT,
              "summary entry \"" + full + "\" is not numeric");
}

void qz_run_destroy(qz_run* run) { delete run; }

qz_status qz_verify(int* total, int* failed, char** report) {
  if (report) *report = nullptr;
  try {
    const qzeno::VerifyReport rep = qzeno::run_verification();
    if (total) *total = rep.total();
    if (failed) *failed = rep.failed();
    if (report) {
      const std::string table = rep.table();
      char* buf = static_cast<char*>(std::malloc(table.size() + 1));
      if (!buf) return fail(nullptr, QZ_ERROR_INTERNAL, "out of memory");
      std::memcpy(buf, table.c_str(), table.size() + 1);
      *report = buf;
    }
    return rep.all_passed() ? QZ_OK : QZ_ERROR_NUMERIC;
  } catch (const std::exception& e) {
    return fail(nullptr, classify(e), e.what());
  }
}

void qz_string_free(char* s) { std::free(s); }

}  // extern "C"
