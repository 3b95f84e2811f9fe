// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0
//
// Built-in self-check suite: fast, deterministic invariant checks across all
// engines, runnable from the CLI (`qzeno verify`) and the C API.

#pragma once

#include <string>
#include <vector>

namespace qzeno {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;  // failure reason or key numbers on success
  double seconds = 0.0;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;

  int total() const { return static_cast<int>(checks.size()); }
  int failed() const;
  bool all_passed() const { return failed() == 0; }
  // Fixed-width pass/fail table, one line per check plus a footer.
  std::string table() const;
};

VerifyReport run_verification();

}  // namespace qzeno
