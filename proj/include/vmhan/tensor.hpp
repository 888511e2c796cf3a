// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vmhan {

/// Dense row-major tensor of doubles. Rank 1 and rank 2 are the only ranks
/// the model uses, but any positive-extent shape is accepted.
class Tensor {
 public:
  Tensor() = default;

  /// Zero-filled tensor of the given shape.
  explicit Tensor(std::vector<std::size_t> shape);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor vector(std::vector<double> data);
  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> data);
  static Tensor identity(std::size_t n);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  /// Leading extent; for a vector, its length.
  std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
  /// Trailing extent of a matrix; 1 for a vector.
  std::size_t cols() const { return shape_.size() < 2 ? 1 : shape_[1]; }

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }
  const std::vector<double>& data() const { return data_; }

  std::span<const double> row(std::size_t r) const;
  std::span<double> row(std::size_t r);

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols() + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols() + c];
  }

  void fill(double value);

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

std::string shape_string(const std::vector<std::size_t>& shape);

/// Throws NumericInstabilityError naming `where` if any value is NaN/Inf.
void check_finite(std::span<const double> values, std::string_view where);

/// a[m x k] * b[k x n], accumulated over k in ascending order.
Tensor matmul(const Tensor& a, const Tensor& b);

/// Softmax over `members` of `scores`; zero elsewhere.
Tensor masked_softmax(const Tensor& scores,
                      std::span<const std::size_t> members);

/// Elementwise ln(1 + e^x).
Tensor softplus(const Tensor& x);

double softplus(double x);
double logistic(double x);

}  // namespace vmhan
