// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "vmhan/tensor.hpp"

namespace vmhan {

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
};

/// Named learnable tensors with same-shaped gradients, kept in registration
/// order. Slots returned by add() stay valid for the store's lifetime.
class ParamStore {
 public:
  std::size_t add(std::string name, Tensor value);

  bool contains(const std::string& name) const;
  std::size_t slot(const std::string& name) const;

  Parameter& operator[](std::size_t slot) { return params_[slot]; }
  const Parameter& operator[](std::size_t slot) const { return params_[slot]; }
  Parameter& get(const std::string& name) { return params_[slot(name)]; }
  const Parameter& get(const std::string& name) const {
    return params_[slot(name)];
  }

  std::size_t size() const { return params_.size(); }
  /// Total number of scalar components across all parameters.
  std::size_t scalar_count() const;

  std::span<Parameter> params() { return params_; }
  std::span<const Parameter> params() const { return params_; }

  void zero_grads();

 private:
  std::vector<Parameter> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Per-parameter gradient buffers laid out like a ParamStore. Used as the
/// private accumulation target of one worker.
class GradientBuffer {
 public:
  GradientBuffer() = default;
  explicit GradientBuffer(const ParamStore& store);

  std::span<double> operator[](std::size_t slot) { return grads_[slot]; }
  std::span<const double> operator[](std::size_t slot) const {
    return grads_[slot];
  }
  std::size_t size() const { return grads_.size(); }

  void zero();
  /// store.grad += scale * this, slot by slot in registration order.
  void add_to(ParamStore& store, double scale = 1.0) const;

 private:
  std::vector<std::vector<double>> grads_;
};

}  // namespace vmhan
