// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vmhan/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "vmhan/error.hpp"
#include "vmhan/kernels.hpp"

namespace vmhan {

namespace {

std::size_t element_count(const std::vector<std::size_t>& shape) {
  if (shape.empty()) throw DimensionError("tensor shape must have rank >= 1");
  std::size_t n = 1;
  for (std::size_t e : shape) {
    if (e == 0) {
      throw DimensionError("tensor extents must be positive, got " +
                           shape_string(shape));
    }
    n *= e;
  }
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(element_count(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (element_count(shape_) != data_.size()) {
    throw DimensionError("shape " + shape_string(shape_) + " needs " +
                         std::to_string(element_count(shape_)) +
                         " values, got " + std::to_string(data_.size()));
  }
}

Tensor Tensor::vector(std::vector<double> data) {
  std::size_t n = data.size();
  return Tensor({n}, std::move(data));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> data) {
  return Tensor({rows, cols}, std::move(data));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

std::span<const double> Tensor::row(std::size_t r) const {
  return std::span<const double>(data_).subspan(r * cols(), cols());
}

std::span<double> Tensor::row(std::size_t r) {
  return std::span<double>(data_).subspan(r * cols(), cols());
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << 'x';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

void check_finite(std::span<const double> values, std::string_view where) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw NumericInstabilityError("non-finite value in " +
                                    std::string(where));
    }
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    throw DimensionError("matmul shape mismatch: " + shape_string(a.shape()) +
                         " x " + shape_string(b.shape()));
  }
  const std::size_t m = a.rows();
  const std::size_t k = a.cols();
  const std::size_t n = b.cols();
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a(i, p);
      for (std::size_t j = 0; j < n; ++j) out(i, j) += aip * b(p, j);
    }
  }
  check_finite(out.values(), "matmul");
  return out;
}

Tensor masked_softmax(const Tensor& scores,
                      std::span<const std::size_t> members) {
  if (members.empty()) {
    throw InvalidHyperedgeError("masked_softmax over an empty member set");
  }
  std::vector<double> picked;
  picked.reserve(members.size());
  for (std::size_t idx : members) {
    if (idx >= scores.size()) {
      throw DimensionError("member index " + std::to_string(idx) +
                           " out of range for " +
                           shape_string(scores.shape()));
    }
    picked.push_back(scores[idx]);
  }
  check_finite(picked, "masked_softmax scores");
  kernels::softmax_inplace(picked);
  Tensor out(scores.shape());
  for (std::size_t i = 0; i < members.size(); ++i) {
    out[members[i]] = picked[i];
  }
  return out;
}

double softplus(double x) {
  // ln(1 + e^x) = max(x, 0) + ln(1 + e^{-|x|})
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor softplus(const Tensor& x) {
  Tensor out = x;
  for (double& v : out.values()) v = softplus(v);
  check_finite(out.values(), "softplus");
  return out;
}

}  // namespace vmhan
