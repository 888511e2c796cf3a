// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

// Span-level dense kernels shared by the model code. Every loop accumulates
// in ascending index order so results do not depend on the caller's thread
// layout.

#pragma once

#include <cstddef>
#include <span>

namespace vmhan::kernels {

double dot(std::span<const double> a, std::span<const double> b);

/// y = A x, A is rows x cols row-major.
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y);

/// y += A^T x.
void gemv_t_acc(std::span<const double> a, std::size_t rows, std::size_t cols,
                std::span<const double> x, std::span<double> y);

/// G += u v^T, G is |u| x |v| row-major.
void outer_acc(std::span<double> g, std::span<const double> u,
               std::span<const double> v);

/// y += alpha * x.
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// In-place max-subtracted softmax.
void softmax_inplace(std::span<double> v);

}  // namespace vmhan::kernels
