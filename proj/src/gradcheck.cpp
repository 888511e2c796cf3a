// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vmhan/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "vmhan/error.hpp"

namespace vmhan {

namespace {

double checked_loss(const std::function<double(const ParamStore&)>& loss_fn,
                    const ParamStore& params) {
  const double f = loss_fn(params);
  if (!std::isfinite(f)) {
    throw NumericInstabilityError("gradcheck: loss is not finite");
  }
  return f;
}

}  // namespace

GradcheckReport finite_diff_gradcheck(
    const std::function<double(const ParamStore&)>& loss_fn,
    ParamStore& params, double step, double tol) {
  if (!(step > 0.0)) throw ValidationError("gradcheck step must be > 0");
  checked_loss(loss_fn, params);

  GradcheckReport report;
  for (auto& p : params.params()) {
    auto values = p.value.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + step;
      const double up = checked_loss(loss_fn, params);
      values[i] = saved - step;
      const double down = checked_loss(loss_fn, params);
      values[i] = saved;

      const double numeric = (up - down) / (2.0 * step);
      const double analytic = p.grad[i];
      const double rel = std::abs(analytic - numeric) /
                         std::max(1e-8, std::abs(analytic) + std::abs(numeric));
      ++report.checked;
      if (report.worst_param.empty() || rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = p.name;
        report.worst_index = i;
        report.worst_analytic = analytic;
        report.worst_numeric = numeric;
      }
    }
  }
  report.passed = report.max_rel_error < tol;
  return report;
}

}  // namespace vmhan
