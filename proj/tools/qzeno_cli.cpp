// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Talks to the engines exclusively through the C API
// in qzeno.h. On success the summary JSON goes to stdout and artifacts into
// --out; on failure a one-line machine-readable error JSON goes to stderr.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "qzeno.h"

namespace {

std::string json_escape(const std::string& raw) {
  std::string out;
  out.reserve(raw.size() + 8);
  for (const char c : raw) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

int emit_error(qz_status status, const std::string& message) {
  std::fprintf(stderr, "{\"error\":{\"status\":\"%s\",\"message\":\"%s\"}}\n",
               qz_status_name(status), json_escape(message).c_str());
  return 1;
}

struct EngineArgs {
  std::string spec_path;
  std::string out_dir = "qzeno_out";
  std::uint64_t seed = 0;
  bool seed_given = false;
  long realizations = 0;
  bool realizations_given = false;
  int threads = 1;
};

void add_engine_options(CLI::App* cmd, EngineArgs& args) {
  cmd->add_option("--spec", args.spec_path, "experiment spec file (JSON)")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory for artifacts");
  cmd->add_option("--seed", args.seed, "master seed override (64-bit unsigned)");
  cmd->add_option("--realizations", args.realizations, "realization count override");
  cmd->add_option("--threads", args.threads,
                  "worker threads (0 = all cores); never affects results");
}

int run_engine_command(const EngineArgs& args, const char* expected_engine) {
  std::ifstream file(args.spec_path, std::ios::binary);
  if (!file)
    return emit_error(QZ_ERROR_IO, "cannot read spec file " + args.spec_path);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  const std::string spec_text = buffer.str();

  qz_run* run = nullptr;
  qz_status status = qz_run_create(spec_text.c_str(), &run);
  if (status != QZ_OK) return emit_error(status, qz_last_error());

  int exit_code = 0;
  do {
    if (std::strcmp(qz_run_engine_name(run), expected_engine) != 0) {
      exit_code = emit_error(
          QZ_ERROR_CONFIG, std::string("spec engine \"") + qz_run_engine_name(run) +
                               "\" does not match this subcommand (expected \"" +
                               expected_engine + "\")");
      break;
    }
    if (args.seed_given && (status = qz_run_set_seed(run, args.seed)) != QZ_OK) {
      exit_code = emit_error(status, qz_run_error_message(run));
      break;
    }
    if (args.realizations_given &&
        (status = qz_run_set_realizations(run, args.realizations)) != QZ_OK) {
      exit_code = emit_error(status, qz_run_error_message(run));
      break;
    }
    if ((status = qz_run_set_threads(run, args.threads)) != QZ_OK) {
      exit_code = emit_error(status, qz_run_error_message(run));
      break;
    }
    if ((status = qz_run_execute(run)) != QZ_OK) {
      exit_code = emit_error(status, qz_run_error_message(run));
      break;
    }
    if ((status = qz_run_write_artifacts(run, args.out_dir.c_str())) != QZ_OK) {
      exit_code = emit_error(status, qz_run_error_message(run));
      break;
    }
    for (long i = 0; i < qz_run_artifact_count(run); ++i) {
      if (std::strcmp(qz_run_artifact_name(run, i), "summary.json") == 0)
        std::fputs(qz_run_artifact_content(run, i), stdout);
    }
  } while (false);

  qz_run_destroy(run);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum Zeno / anti-Zeno simulation toolkit"};
  app.require_subcommand(1);

  EngineArgs zeno_args, rotor_args, decay_args;
  CLI::App* zeno = app.add_subcommand("zeno", "two-level system under repeated measurement");
  add_engine_options(zeno, zeno_args);
  CLI::App* rotor = app.add_subcommand("rotor", "kicked rotor with measurement schedules");
  add_engine_options(rotor, rotor_args);
  CLI::App* decay = app.add_subcommand("decay", "survival-probability laws and band integral");
  add_engine_options(decay, decay_args);
  CLI::App* verify = app.add_subcommand("verify", "run the built-in invariant suite");

  CLI11_PARSE(app, argc, argv);

  zeno_args.seed_given = zeno->count("--seed") > 0;
  zeno_args.realizations_given = zeno->count("--realizations") > 0;
  rotor_args.seed_given = rotor->count("--seed") > 0;
  rotor_args.realizations_given = rotor->count("--realizations") > 0;
  decay_args.seed_given = decay->count("--seed") > 0;
  decay_args.realizations_given = decay->count("--realizations") > 0;

  if (zeno->parsed()) return run_engine_command(zeno_args, "two_level");
  if (rotor->parsed()) return run_engine_command(rotor_args, "rotor");
  if (decay->parsed()) return run_engine_command(decay_args, "decay");
  if (verify->parsed()) {
    int total = 0, failed = 0;
    char* report = nullptr;
    const qz_status status = qz_verify(&total, &failed, &report);
    if (report) {
      std::fputs(report, stdout);
      qz_string_free(report);
    }
    if (status != QZ_OK && failed == 0) return emit_error(status, qz_last_error());
    return failed == 0 ? 0 : 1;
  }
  return 0;
}
