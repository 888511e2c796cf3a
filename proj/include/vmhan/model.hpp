// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vmhan/hypergraph.hpp"
#include "vmhan/objective.hpp"
#include "vmhan/param_store.hpp"
#include "vmhan/rng.hpp"
#include "vmhan/vhan.hpp"

namespace vmhan {

struct ModelConfig {
  VhanConfig encoder;
  RelationVocabulary relations;
  std::size_t max_objects = 3;  // k
  bool inter_modal = true;

  HypergraphOptions graph_options() const { return {inter_modal}; }
  void validate() const;
};

/// One labelled example, ready for the model.
struct Instance {
  std::string id;
  MultiModalHypergraph graph;
  std::size_t label;  // index into the relation vocabulary
};

using Dataset = std::vector<Instance>;

struct LossBreakdown {
  double classification = 0.0;
  double reconstruction = 0.0;
  double kl = 0.0;
  double total = 0.0;
  std::vector<double> probs;
};

/// Encoder plus classifier over a ParamStore. Parameters live in `params()`;
/// every method reads their current values, so callers may perturb them
/// (gradient checks) or update them (training) between calls.
class VmHanModel {
 public:
  /// Fresh model with weights drawn from Rng(seed).
  VmHanModel(ModelConfig config, std::uint64_t seed);
  /// Model over an existing store (snapshot load); shapes are validated.
  VmHanModel(ModelConfig config, ParamStore params);

  const ModelConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  const VhanSlots& slots() const { return slots_; }
  std::size_t classifier_weight_slot() const { return cls_weight_; }
  std::size_t classifier_bias_slot() const { return cls_bias_; }

  /// Relation distribution in eval mode.
  std::vector<double> predict(const MultiModalHypergraph& graph) const;

  /// Reconstruction targets are the layer-0 states of this very call unless
  /// `fixed_targets` is given. Gradients treat targets as constants, so a
  /// finite-difference check must pass the targets of the unperturbed model.
  LossBreakdown loss(const MultiModalHypergraph& graph, std::size_t gold,
                     const LossWeights& weights, Mode mode = Mode::Eval,
                     Rng* rng = nullptr,
                     const ReconTargets* fixed_targets = nullptr) const;

  /// Layer-0 reconstruction targets under the current parameters.
  ReconTargets recon_targets(const MultiModalHypergraph& graph) const;

  /// Same as loss(), and adds grad_scale * d(total)/d(params) to `grads`.
  LossBreakdown loss_and_gradient(const MultiModalHypergraph& graph,
                                  std::size_t gold, const LossWeights& weights,
                                  Mode mode, Rng* rng, GradientBuffer& grads,
                                  double grad_scale = 1.0) const;

 private:
  LossBreakdown evaluate(const MultiModalHypergraph& graph, std::size_t gold,
                         const LossWeights& weights, Mode mode, Rng* rng,
                         const ReconTargets* fixed_targets,
                         GradientBuffer* grads, double grad_scale) const;

  ModelConfig config_;
  ParamStore params_;
  VhanSlots slots_;
  std::size_t cls_weight_ = 0;
  std::size_t cls_bias_ = 0;
};

}  // namespace vmhan
