// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vmhan/parallel.hpp"

#include <cstdlib>
#include <string>

namespace vmhan {

int configured_threads() {
  const char* raw = std::getenv("VMHAN_THREADS");
  if (!raw || !*raw) return 1;
  try {
    const int n = std::stoi(raw);
    return n > 1 ? n : 1;
  } catch (const std::exception&) {
    return 1;
  }
}

}  // namespace vmhan
