// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

// Variational hypergraph attention encoder.
//
// Every node and hyperedge carries a diagonal Gaussian (mean, raw variance).
// A layer updates edges from their member nodes and nodes from their
// incident edges, both reading the previous layer's values:
//
//   alpha[j][i] = softmax_{i in e_j} (W_e e_j) . (W_x x_i) / sqrt(d_head)
//   beta[i][j]  = softmax_{j ni i}   (W_x x_i) . (W_e e_j) / sqrt(d_head)
//   e_mu'    = logistic(W_e_mu    sum_i alpha   x_mu)    + e_mu
//   e_sigma' = logistic(W_e_sigma sum_i alpha^2 x_sigma) + e_sigma
//   x_mu'    = logistic(W_x_mu    sum_j beta    e_mu)    + x_mu
//   x_sigma' = logistic(W_x_sigma sum_j beta^2  e_sigma) + x_sigma
//
// With several heads the d-vectors are cut into `heads` contiguous slices;
// each slice gets its own attention weights and the slices are concatenated
// before the W_*_mu / W_*_sigma maps. Variances are stored raw and made
// positive with softplus(.) + eps_var wherever they are consumed.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vmhan/hypergraph.hpp"
#include "vmhan/param_store.hpp"
#include "vmhan/rng.hpp"
#include "vmhan/tensor.hpp"

namespace vmhan {

enum class Mode : std::uint8_t { Train, Eval };

struct VhanConfig {
  std::size_t d = 64;
  std::size_t layers = 2;
  std::size_t heads = 1;
  double dropout = 0.6;  // on node means between layers, training only
  double eps_var = 1e-6;
  std::size_t text_dim = 768;
  std::size_t visual_dim = 4096;

  std::size_t head_dim() const { return d / heads; }
  /// Throws ValidationError when d % heads != 0, layers == 0, etc.
  void validate() const;
};

struct LayerSlots {
  std::size_t w_x;
  std::size_t w_e;
  std::size_t w_e_mu;
  std::size_t w_e_sigma;
  std::size_t w_x_mu;
  std::size_t w_x_sigma;
};

struct VhanSlots {
  std::size_t proj_text;
  std::size_t proj_visual;
  std::size_t w_mu;
  std::size_t w_sigma;
  std::vector<LayerSlots> layers;
};

/// Registers every encoder matrix under a stable name ("proj.text",
/// "layer0.w_x", ...) with Xavier-uniform values drawn from `rng`.
VhanSlots register_vhan_params(ParamStore& store, const VhanConfig& config,
                               Rng& rng);

/// Looks up the slots of an already populated store, checking shapes.
VhanSlots find_vhan_params(const ParamStore& store, const VhanConfig& config);

/// Row-per-item Gaussian states (nodes or hyperedges).
struct GaussianStates {
  Tensor mu;         // count x d
  Tensor sigma_raw;  // count x d

  std::size_t count() const { return mu.rows(); }
  std::size_t dim() const { return mu.cols(); }
};

/// softplus(sigma_raw) + eps, elementwise.
std::vector<double> effective_variance(std::span<const double> sigma_raw,
                                       double eps);

struct LayerState {
  GaussianStates nodes;
  GaussianStates edges;
};

/// Layer-0 states: modality projection, then W_mu / W_sigma for nodes;
/// hyperedges start at the mean of their members.
LayerState variational_init(const MultiModalHypergraph& graph,
                            const ParamStore& params, const VhanSlots& slots,
                            const VhanConfig& config);

/// Attention of one hyperedge over its members: |members| x heads,
/// row-major, each column summing to one.
std::vector<double> edge_attention(const Hyperedge& edge, const Tensor& node_mu,
                                   std::span<const double> edge_mu,
                                   const Tensor& w_x, const Tensor& w_e,
                                   std::size_t heads);

/// Intermediates of one layer kept for the backward pass.
struct LayerCache {
  Tensor q;      // n x d, W_x x_mu
  Tensor k;      // m x d, W_e e_mu
  // Dense [edge][node][head] tables; zero off the incidence pattern.
  std::vector<double> alpha;
  std::vector<double> beta;
  Tensor edge_agg_mu, edge_agg_sigma;  // m x d
  Tensor node_agg_mu, node_agg_sigma;  // n x d
  Tensor edge_act_mu, edge_act_sigma;  // logistic outputs, m x d
  Tensor node_act_mu, node_act_sigma;  // n x d
  std::vector<double> dropout_mask;    // n*d, empty when no dropout ran
};

/// One synchronous layer. Dropout runs only when `mode` is Train,
/// `apply_dropout` is set, config.dropout > 0 and `rng` is non-null.
LayerState layer_forward(const MultiModalHypergraph& graph,
                         const LayerState& in, const ParamStore& params,
                         const LayerSlots& slots, const VhanConfig& config,
                         Mode mode, Rng* rng, bool apply_dropout,
                         LayerCache* cache = nullptr);

struct ForwardTrace {
  std::vector<LayerState> states;  // layers + 1 entries, states[0] = init
  std::vector<LayerCache> caches;  // one per layer

  const LayerState& initial() const { return states.front(); }
  const LayerState& final() const { return states.back(); }
};

ForwardTrace forward_trace(const MultiModalHypergraph& graph,
                           const ParamStore& params, const VhanSlots& slots,
                           const VhanConfig& config, Mode mode, Rng* rng);

/// Final node states after config.layers layers.
GaussianStates forward(const MultiModalHypergraph& graph,
                       const ParamStore& params, const VhanSlots& slots,
                       const VhanConfig& config, Mode mode, Rng* rng = nullptr);

/// Accumulates into `grads` the parameter gradients of a scalar whose
/// derivatives w.r.t. the final node means / raw variances are given.
void backward(const MultiModalHypergraph& graph, const ForwardTrace& trace,
              const ParamStore& params, const VhanSlots& slots,
              const VhanConfig& config, const Tensor& d_node_mu,
              const Tensor& d_node_sigma, GradientBuffer& grads);

/// [mu_h ; var_h ; mu_t ; var_t] with var = softplus(sigma_raw) + eps.
std::vector<double> readout(std::span<const double> head_mu,
                            std::span<const double> head_sigma_raw,
                            std::span<const double> tail_mu,
                            std::span<const double> tail_sigma_raw, double eps);

}  // namespace vmhan
