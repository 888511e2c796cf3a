// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

// Small shared builders for the unit tests.

#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "vmhan/model.hpp"

namespace fixtures {

inline vmhan::RelationVocabulary vocabulary(std::size_t relations) {
  std::vector<std::string> labels;
  for (std::size_t r = 0; r < relations; ++r) labels.push_back("rel" + std::to_string(r));
  return vmhan::RelationVocabulary(labels);
}

inline vmhan::ModelConfig small_config(std::size_t d = 8, std::size_t layers = 1,
                                       std::size_t heads = 1,
                                       std::size_t relations = 3) {
  vmhan::ModelConfig c;
  c.encoder.d = d;
  c.encoder.layers = layers;
  c.encoder.heads = heads;
  c.encoder.dropout = 0.0;
  c.encoder.text_dim = 12;
  c.encoder.visual_dim = 20;
  c.relations = vocabulary(relations);
  return c;
}

/// Raw value whose softplus(.) + eps equals `variance`.
inline double raw_for_variance(double variance, double eps = 1e-6) {
  const double v = variance - eps;
  return v + std::log(-std::expm1(-v));
}

/// Fresh scratch directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag)
      : path_(std::filesystem::temp_directory_path() /
              ("vmhan_test_" + tag + "_" + std::to_string(::getpid()))) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
