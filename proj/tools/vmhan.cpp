// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vmhan/cli.hpp"

int main(int argc, char** argv) { return vmhan::cli_dispatch(argc, argv); }
