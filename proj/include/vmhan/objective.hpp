// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "vmhan/tensor.hpp"
#include "vmhan/vhan.hpp"

namespace vmhan {

/// Ordered relation labels; `none` is always the last entry.
class RelationVocabulary {
 public:
  static constexpr const char* kNone = "none";

  RelationVocabulary() : RelationVocabulary(std::vector<std::string>{}) {}
  /// `labels` may omit `none` (it is appended) but must not list it anywhere
  /// except last, and must not repeat a label.
  explicit RelationVocabulary(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  std::size_t none_index() const { return labels_.size() - 1; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  bool contains(const std::string& label) const;
  /// Throws ValidationError for an unknown label.
  std::size_t index_of(const std::string& label) const;

  friend bool operator==(const RelationVocabulary& a,
                         const RelationVocabulary& b) {
    return a.labels_ == b.labels_;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct LossWeights {
  double classification = 1.0;
  double reconstruction = 0.1;
  double kl = 0.01;

  void validate() const;
};

/// Constant per-node targets of the reconstruction term.
struct ReconTargets {
  Tensor mean;      // n x d
  Tensor variance;  // n x d, effective variances

  /// Targets taken from layer-0 node states.
  static ReconTargets from_states(const GaussianStates& layer0, double eps);
};

/// softmax(W r + b) over the relation vocabulary.
std::vector<double> classify(std::span<const double> readout_vec,
                             const Tensor& weight, const Tensor& bias);

/// -log(max(probs[gold], 1e-12)).
double loss_classification(std::span<const double> probs, std::size_t gold);

/// (1/n) sum_i |t_mean_i - mu_i|^2 + |t_var_i - var_i|^2, var effective.
double loss_reconstruction(const GaussianStates& states,
                           const ReconTargets& targets, double eps);

/// (1/n) sum_i KL(N(mu_i, diag var_i) || N(0, I)).
double loss_kl(const GaussianStates& states, double eps);

double loss_total(double l_c, double l_rec, double l_kl,
                  const LossWeights& weights);

/// Adds scale * d(loss_reconstruction)/d(mu, sigma_raw) into the tensors.
void loss_reconstruction_grad(const GaussianStates& states,
                              const ReconTargets& targets, double eps,
                              double scale, Tensor& d_mu, Tensor& d_sigma);

/// Adds scale * d(loss_kl)/d(mu, sigma_raw) into the tensors.
void loss_kl_grad(const GaussianStates& states, double eps, double scale,
                  Tensor& d_mu, Tensor& d_sigma);

}  // namespace vmhan
