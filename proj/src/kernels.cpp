// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vmhan/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace vmhan::kernels {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = dot(a.subspan(r * cols, cols), x);
  }
}

void gemv_t_acc(std::span<const double> a, std::size_t rows, std::size_t cols,
                std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    const double* arow = a.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) y[c] += arow[c] * xr;
  }
}

void outer_acc(std::span<double> g, std::span<const double> u,
               std::span<const double> v) {
  const std::size_t cols = v.size();
  for (std::size_t r = 0; r < u.size(); ++r) {
    const double ur = u[r];
    if (ur == 0.0) continue;
    double* grow = g.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) grow[c] += ur * v[c];
  }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void softmax_inplace(std::span<double> v) {
  if (v.empty()) return;
  const double mx = *std::max_element(v.begin(), v.end());
  double total = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    total += x;
  }
  for (double& x : v) x /= total;
}

}  // namespace vmhan::kernels
