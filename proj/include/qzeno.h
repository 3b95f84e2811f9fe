/* Copyright 2026 the qzeno developers
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the qzeno simulation engines. A run is created from a JSON
 * experiment spec, optionally adjusted (seed, realizations, threads),
 * executed, and queried for artifacts and summary values. All functions are
 * safe to call from multiple threads as long as each qz_run is used from one
 * thread at a time. Results are bit-identical for any thread count.
 */

#ifndef QZENO_H
#define QZENO_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qz_status {
  QZ_OK = 0,
  QZ_ERROR_INVALID_ARGUMENT = 1, /* null pointer, bad index, bad path */
  QZ_ERROR_CONFIG = 2,           /* spec validation failed */
  QZ_ERROR_DOMAIN = 3,           /* argument outside a formula's domain */
  QZ_ERROR_NUMERIC = 4,          /* quadrature/propagation failure */
  QZ_ERROR_FIT = 5,              /* estimator could not run */
  QZ_ERROR_IO = 6,               /* artifact writing failed */
  QZ_ERROR_INTERNAL = 7
} qz_status;

typedef struct qz_run qz_run;

/* Library version string, e.g. "0.1.0". */
const char* qz_version(void);

/* Stable name for a status code, e.g. "QZ_ERROR_CONFIG". */
const char* qz_status_name(qz_status status);

/* Parses and validates spec_json. On success *run owns the parsed spec.
 * On failure *run is NULL and qz_last_error() explains why. */
qz_status qz_run_create(const char* spec_json, qz_run** run);

/* Most recent error on the calling thread from functions that have no run
 * (qz_run_create, qz_verify). Never NULL; empty string when no error. */
const char* qz_last_error(void);

/* Most recent error recorded on this run. Never NULL. */
const char* qz_run_error_message(const qz_run* run);

/* Engine selected by the spec: "two_level", "rotor" or "decay". */
const char* qz_run_engine_name(const qz_run* run);

/* Override the master seed / realization count from the spec; both are
 * reflected in the resolved spec echoed into artifacts. Threads change only
 * scheduling, never results, and are not echoed. Call before execute. */
qz_status qz_run_set_seed(qz_run* run, uint64_t seed);
qz_status qz_run_set_realizations(qz_run* run, long n);
qz_status qz_run_set_threads(qz_run* run, int n);

qz_status qz_run_execute(qz_run* run);

/* Artifact access after a successful execute. Returned strings are owned by
 * the run and stay valid until the next execute or destroy. */
long qz_run_artifact_count(const qz_run* run);
const char* qz_run_artifact_name(const qz_run* run, long index);
const char* qz_run_artifact_content(const qz_run* run, long index);

/* Writes every artifact into out_dir, creating it if needed. */
qz_status qz_run_write_artifacts(qz_run* run, const char* out_dir);

/* Numeric summary lookup by dotted path into summary.json, e.g.
 * "B.estimate", "lambda.flagged" (booleans read as 0/1), "B.window.0". */
qz_status qz_run_summary_value(qz_run* run, const char* path, double* value);

void qz_run_destroy(qz_run* run);

/* Runs the built-in invariant suite. total/failed may be NULL. When report
 * is non-NULL it receives a malloc'd pass/fail table; release it with
 * qz_string_free. Returns QZ_OK only if every check passed. */
qz_status qz_verify(int* total, int* failed, char** report);

void qz_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* QZENO_H */
