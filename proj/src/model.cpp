// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vmhan/model.hpp"

#include <cmath>

#include "vmhan/error.hpp"
#include "vmhan/kernels.hpp"

namespace vmhan {

void ModelConfig::validate() const {
  encoder.validate();
  if (relations.size() < 2) {
    throw ValidationError("relation vocabulary needs at least one relation");
  }
}

VmHanModel::VmHanModel(ModelConfig config, std::uint64_t seed)
    : config_(std::move(config)) {
  config_.validate();
  Rng rng(seed);
  slots_ = register_vhan_params(params_, config_.encoder, rng);
  const std::size_t classes = config_.relations.size();
  const std::size_t width = 4 * config_.encoder.d;
  const double limit = std::sqrt(6.0 / static_cast<double>(classes + width));
  Tensor w({classes, width});
  for (double& v : w.values()) v = rng.uniform(-limit, limit);
  cls_weight_ = params_.add("cls.weight", std::move(w));
  cls_bias_ = params_.add("cls.bias", Tensor({classes}));
}

VmHanModel::VmHanModel(ModelConfig config, ParamStore params)
    : config_(std::move(config)), params_(std::move(params)) {
  config_.validate();
  slots_ = find_vhan_params(params_, config_.encoder);
  cls_weight_ = params_.slot("cls.weight");
  cls_bias_ = params_.slot("cls.bias");
  const auto& w = params_[cls_weight_].value;
  const auto& b = params_[cls_bias_].value;
  if (w.rank() != 2 || w.rows() != config_.relations.size() ||
      w.cols() != 4 * config_.encoder.d || b.size() != w.rows()) {
    throw DimensionError("classifier parameters do not match the config");
  }
}

std::vector<double> VmHanModel::predict(
    const MultiModalHypergraph& graph) const {
  const GaussianStates final =
      forward(graph, params_, slots_, config_.encoder, Mode::Eval);
  const auto r = readout(final.mu.row(MultiModalHypergraph::kHead),
                         final.sigma_raw.row(MultiModalHypergraph::kHead),
                         final.mu.row(MultiModalHypergraph::kTail),
                         final.sigma_raw.row(MultiModalHypergraph::kTail),
                         config_.encoder.eps_var);
  return classify(r, params_[cls_weight_].value, params_[cls_bias_].value);
}

LossBreakdown VmHanModel::loss(const MultiModalHypergraph& graph,
                               std::size_t gold, const LossWeights& weights,
                               Mode mode, Rng* rng,
                               const ReconTargets* fixed_targets) const {
  return evaluate(graph, gold, weights, mode, rng, fixed_targets, nullptr, 0.0);
}

ReconTargets VmHanModel::recon_targets(
    const MultiModalHypergraph& graph) const {
  return ReconTargets::from_states(
      variational_init(graph, params_, slots_, config_.encoder).nodes,
      config_.encoder.eps_var);
}

LossBreakdown VmHanModel::loss_and_gradient(const MultiModalHypergraph& graph,
                                            std::size_t gold,
                                            const LossWeights& weights,
                                            Mode mode, Rng* rng,
                                            GradientBuffer& grads,
                                            double grad_scale) const {
  return evaluate(graph, gold, weights, mode, rng, nullptr, &grads,
                  grad_scale);
}

LossBreakdown VmHanModel::evaluate(const MultiModalHypergraph& graph,
                                   std::size_t gold,
                                   const LossWeights& weights, Mode mode,
                                   Rng* rng,
                                   const ReconTargets* fixed_targets,
                                   GradientBuffer* grads,
                                   double grad_scale) const {
  const VhanConfig& enc = config_.encoder;
  const double eps = enc.eps_var;
  const ForwardTrace trace =
      forward_trace(graph, params_, slots_, enc, mode, rng);
  const GaussianStates& final = trace.final().nodes;
  const ReconTargets targets =
      fixed_targets ? *fixed_targets
                    : ReconTargets::from_states(trace.initial().nodes, eps);

  constexpr std::size_t h = MultiModalHypergraph::kHead;
  constexpr std::size_t t = MultiModalHypergraph::kTail;
  const auto r = readout(final.mu.row(h), final.sigma_raw.row(h),
                         final.mu.row(t), final.sigma_raw.row(t), eps);
  const Tensor& w = params_[cls_weight_].value;
  const Tensor& b = params_[cls_bias_].value;

  LossBreakdown out;
  out.probs = classify(r, w, b);
  out.classification = loss_classification(out.probs, gold);
  out.reconstruction = loss_reconstruction(final, targets, eps);
  out.kl = loss_kl(final, eps);
  out.total =
      loss_total(out.classification, out.reconstruction, out.kl, weights);
  if (!std::isfinite(out.total)) {
    throw NumericInstabilityError("loss is not finite");
  }
  if (!grads) return out;

  const std::size_t d = enc.d;
  Tensor d_mu(final.mu.shape());
  Tensor d_sigma(final.sigma_raw.shape());

  // Cross-entropy through softmax; zero when the probability floor is hit.
  if (out.probs[gold] > 1e-12 && weights.classification != 0.0) {
    std::vector<double> d_logits = out.probs;
    d_logits[gold] -= 1.0;
    for (double& v : d_logits) v *= grad_scale * weights.classification;
    kernels::outer_acc((*grads)[cls_weight_], d_logits, r);
    kernels::axpy(1.0, d_logits, (*grads)[cls_bias_]);
    std::vector<double> d_r(r.size(), 0.0);
    kernels::gemv_t_acc(w.values(), w.rows(), w.cols(), d_logits, d_r);
    // r = [mu_h; var_h; mu_t; var_t], d var / d sigma_raw = logistic.
    for (std::size_t c = 0; c < d; ++c) {
      d_mu(h, c) += d_r[c];
      d_sigma(h, c) += d_r[d + c] * logistic(final.sigma_raw(h, c));
      d_mu(t, c) += d_r[2 * d + c];
      d_sigma(t, c) += d_r[3 * d + c] * logistic(final.sigma_raw(t, c));
    }
  }
  if (weights.reconstruction != 0.0) {
    loss_reconstruction_grad(final, targets, eps,
                             grad_scale * weights.reconstruction, d_mu,
                             d_sigma);
  }
  if (weights.kl != 0.0) {
    loss_kl_grad(final, eps, grad_scale * weights.kl, d_mu, d_sigma);
  }
  backward(graph, trace, params_, slots_, enc, d_mu, d_sigma, *grads);
  return out;
}

}  // namespace vmhan
