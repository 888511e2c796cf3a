// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vmhan {

/// Runs one `vmhan` subcommand. `args` excludes the program name.
/// Returns 0 on success, 1 on validation or I/O failure, 2 on a usage error
/// (unknown subcommand or flag, missing required flag).
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err);

int cli_dispatch(int argc, char** argv);

}  // namespace vmhan
