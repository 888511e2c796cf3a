// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "vmhan/param_store.hpp"

namespace vmhan {

struct GradcheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;  // empty when nothing was checked
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
  bool passed = true;
};

/// Compares the analytic gradients already stored in `params` against
/// central differences (f(θ+h) - f(θ-h)) / 2h of `loss_fn`, one component at
/// a time. Relative error is |a - f| / max(1e-8, |a| + |f|).
///
/// `loss_fn` must be deterministic. Parameter values are restored exactly
/// after each probe. Throws NumericInstabilityError on a non-finite loss.
GradcheckReport finite_diff_gradcheck(
    const std::function<double(const ParamStore&)>& loss_fn,
    ParamStore& params, double step, double tol);

}  // namespace vmhan
