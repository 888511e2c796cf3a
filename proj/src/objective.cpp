// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vmhan/objective.hpp"

#include <algorithm>
#include <cmath>

#include "vmhan/error.hpp"
#include "vmhan/kernels.hpp"

namespace vmhan {

namespace {

constexpr double kProbFloor = 1e-12;

void expect_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(what) + ": " + shape_string(a.shape()) +
                         " vs " + shape_string(b.shape()));
  }
}

}  // namespace

RelationVocabulary::RelationVocabulary(std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  if (labels_.empty() || labels_.back() != kNone) labels_.emplace_back(kNone);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty()) throw ValidationError("empty relation label");
    if (!index_.emplace(labels_[i], i).second) {
      throw ValidationError("relation label '" + labels_[i] +
                            "' listed twice (or 'none' not last)");
    }
  }
}

bool RelationVocabulary::contains(const std::string& label) const {
  return index_.contains(label);
}

std::size_t RelationVocabulary::index_of(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) {
    throw ValidationError("relation '" + label + "' is not in the vocabulary");
  }
  return it->second;
}

void LossWeights::validate() const {
  if (classification < 0 || reconstruction < 0 || kl < 0) {
    throw ValidationError("loss weights must be non-negative");
  }
  if (classification == 0 && reconstruction == 0 && kl == 0) {
    throw ValidationError("loss weights must not all be zero");
  }
}

ReconTargets ReconTargets::from_states(const GaussianStates& layer0,
                                       double eps) {
  ReconTargets t{layer0.mu, layer0.sigma_raw};
  for (double& v : t.variance.values()) v = softplus(v) + eps;
  return t;
}

std::vector<double> classify(std::span<const double> readout_vec,
                             const Tensor& weight, const Tensor& bias) {
  if (weight.rank() != 2 || weight.cols() != readout_vec.size() ||
      bias.size() != weight.rows()) {
    throw DimensionError("classify: weight " + shape_string(weight.shape()) +
                         ", bias " + shape_string(bias.shape()) +
                         ", readout length " +
                         std::to_string(readout_vec.size()));
  }
  std::vector<double> logits(weight.rows());
  kernels::gemv(weight.values(), weight.rows(), weight.cols(), readout_vec,
                logits);
  for (std::size_t r = 0; r < logits.size(); ++r) logits[r] += bias[r];
  check_finite(logits, "classifier logits");
  kernels::softmax_inplace(logits);
  return logits;
}

double loss_classification(std::span<const double> probs, std::size_t gold) {
  if (gold >= probs.size()) {
    throw ValidationError("gold label " + std::to_string(gold) +
                          " out of range");
  }
  return -std::log(std::max(probs[gold], kProbFloor));
}

double loss_reconstruction(const GaussianStates& states,
                           const ReconTargets& targets, double eps) {
  expect_same_shape(states.mu, targets.mean, "loss_reconstruction means");
  expect_same_shape(states.sigma_raw, targets.variance,
                    "loss_reconstruction variances");
  const std::size_t n = states.count();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto mu = states.mu.row(i);
    const auto sig = states.sigma_raw.row(i);
    const auto tm = targets.mean.row(i);
    const auto tv = targets.variance.row(i);
    double node = 0.0;
    for (std::size_t c = 0; c < mu.size(); ++c) {
      const double dm = tm[c] - mu[c];
      const double dv = tv[c] - (softplus(sig[c]) + eps);
      node += dm * dm + dv * dv;
    }
    total += node;
  }
  return total / static_cast<double>(n);
}

double loss_kl(const GaussianStates& states, double eps) {
  const std::size_t n = states.count();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto mu = states.mu.row(i);
    const auto sig = states.sigma_raw.row(i);
    double node = 0.0;
    for (std::size_t c = 0; c < mu.size(); ++c) {
      const double var = softplus(sig[c]) + eps;
      node += var + mu[c] * mu[c] - 1.0 - std::log(var);
    }
    total += 0.5 * node;
  }
  return total / static_cast<double>(n);
}

double loss_total(double l_c, double l_rec, double l_kl,
                  const LossWeights& weights) {
  return weights.classification * l_c + weights.reconstruction * l_rec +
         weights.kl * l_kl;
}

void loss_reconstruction_grad(const GaussianStates& states,
                              const ReconTargets& targets, double eps,
                              double scale, Tensor& d_mu, Tensor& d_sigma) {
  const double k = 2.0 * scale / static_cast<double>(states.count());
  for (std::size_t t = 0; t < states.mu.size(); ++t) {
    const double s = states.sigma_raw[t];
    d_mu[t] += k * (states.mu[t] - targets.mean[t]);
    d_sigma[t] +=
        k * ((softplus(s) + eps) - targets.variance[t]) * logistic(s);
  }
}

void loss_kl_grad(const GaussianStates& states, double eps, double scale,
                  Tensor& d_mu, Tensor& d_sigma) {
  const double k = scale / static_cast<double>(states.count());
  for (std::size_t t = 0; t < states.mu.size(); ++t) {
    const double s = states.sigma_raw[t];
    const double var = softplus(s) + eps;
    d_mu[t] += k * states.mu[t];
    d_sigma[t] += k * 0.5 * (1.0 - 1.0 / var) * logistic(s);
  }
}

}  // namespace vmhan
