// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vmhan/param_store.hpp"

#include <algorithm>

#include "vmhan/error.hpp"

namespace vmhan {

std::size_t ParamStore::add(std::string name, Tensor value) {
  if (index_.contains(name)) {
    throw ValidationError("duplicate parameter name '" + name + "'");
  }
  const std::size_t slot = params_.size();
  index_.emplace(name, slot);
  Tensor grad(value.shape());
  params_.push_back({std::move(name), std::move(value), std::move(grad)});
  return slot;
}

bool ParamStore::contains(const std::string& name) const {
  return index_.contains(name);
}

std::size_t ParamStore::slot(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw ValidationError("unknown parameter '" + name + "'");
  }
  return it->second;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParamStore::zero_grads() {
  for (auto& p : params_) p.grad.fill(0.0);
}

GradientBuffer::GradientBuffer(const ParamStore& store) {
  grads_.reserve(store.size());
  for (const auto& p : store.params()) {
    grads_.emplace_back(p.value.size(), 0.0);
  }
}

void GradientBuffer::zero() {
  for (auto& g : grads_) std::fill(g.begin(), g.end(), 0.0);
}

void GradientBuffer::add_to(ParamStore& store, double scale) const {
  for (std::size_t s = 0; s < grads_.size(); ++s) {
    auto dst = store[s].grad.values();
    const auto& src = grads_[s];
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += scale * src[i];
  }
}

}  // namespace vmhan
