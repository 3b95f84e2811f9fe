// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

namespace qzeno {

/// 0 means "use hardware_concurrency"; anything else is clamped to >= 1.
int resolve_thread_count(int requested);

/// Runs fn(i) for every i in [0, n) on up to n_threads workers. The order in
/// which indices execute is unspecified: callers must write results into
/// per-index slots so later reductions can be done in a fixed order. The
/// first exception thrown by a worker is rethrown after all workers join.
void parallel_for_index(long n, int n_threads, const std::function<void(long)>& fn);

/// Same, but fn also receives the worker id in [0, n_threads) so callers can
/// reuse per-worker scratch buffers. Worker id must not influence results.
void parallel_for_index_workers(long n, int n_threads,
                                const std::function<void(int, long)>& fn);

}  // namespace qzeno
