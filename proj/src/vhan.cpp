// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vmhan/vhan.hpp"

#include <cmath>
#include <string>

#include "vmhan/error.hpp"
#include "vmhan/kernels.hpp"

namespace vmhan {

namespace {

Tensor xavier(std::size_t rows, std::size_t cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Tensor t({rows, cols});
  for (double& v : t.values()) v = rng.uniform(-limit, limit);
  return t;
}

void expect_shape(const Parameter& p, std::size_t rows, std::size_t cols) {
  if (p.value.rank() != 2 || p.value.rows() != rows || p.value.cols() != cols) {
    throw DimensionError("parameter '" + p.name + "' has shape " +
                         shape_string(p.value.shape()) + ", expected " +
                         shape_string({rows, cols}));
  }
}

std::string layer_prefix(std::size_t l) {
  return "layer" + std::to_string(l) + ".";
}

std::span<const double> head_slice(std::span<const double> v, std::size_t h,
                                   std::size_t dh) {
  return v.subspan(h * dh, dh);
}

std::span<double> head_slice(std::span<double> v, std::size_t h,
                             std::size_t dh) {
  return v.subspan(h * dh, dh);
}

// Row-wise y_r = W x_r for every row of `in`.
Tensor project_rows(const Tensor& w, const Tensor& in) {
  Tensor out({in.rows(), w.rows()});
  for (std::size_t r = 0; r < in.rows(); ++r) {
    kernels::gemv(w.values(), w.rows(), w.cols(), in.row(r), out.row(r));
  }
  return out;
}

struct TableIndex {
  std::size_t n;
  std::size_t heads;
  std::size_t operator()(std::size_t j, std::size_t i, std::size_t h) const {
    return (j * n + i) * heads + h;
  }
};

}  // namespace

void VhanConfig::validate() const {
  if (d == 0) throw ValidationError("d must be positive");
  if (heads == 0 || d % heads != 0) {
    throw ValidationError("d (" + std::to_string(d) +
                          ") must be divisible by heads (" +
                          std::to_string(heads) + ")");
  }
  if (layers == 0) throw ValidationError("layer count must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ValidationError("dropout must lie in [0, 1)");
  }
  if (!(eps_var > 0.0)) throw ValidationError("eps_var must be positive");
  if (text_dim == 0 || visual_dim == 0) {
    throw ValidationError("modality dimensions must be positive");
  }
}

VhanSlots register_vhan_params(ParamStore& store, const VhanConfig& config,
                               Rng& rng) {
  config.validate();
  const std::size_t d = config.d;
  VhanSlots s;
  s.proj_text = store.add("proj.text", xavier(d, config.text_dim, rng));
  s.proj_visual = store.add("proj.visual", xavier(d, config.visual_dim, rng));
  s.w_mu = store.add("init.w_mu", xavier(d, d, rng));
  s.w_sigma = store.add("init.w_sigma", xavier(d, d, rng));
  for (std::size_t l = 0; l < config.layers; ++l) {
    const std::string p = layer_prefix(l);
    LayerSlots ls;
    ls.w_x = store.add(p + "w_x", xavier(d, d, rng));
    ls.w_e = store.add(p + "w_e", xavier(d, d, rng));
    ls.w_e_mu = store.add(p + "w_e_mu", xavier(d, d, rng));
    ls.w_e_sigma = store.add(p + "w_e_sigma", xavier(d, d, rng));
    ls.w_x_mu = store.add(p + "w_x_mu", xavier(d, d, rng));
    ls.w_x_sigma = store.add(p + "w_x_sigma", xavier(d, d, rng));
    s.layers.push_back(ls);
  }
  return s;
}

VhanSlots find_vhan_params(const ParamStore& store, const VhanConfig& config) {
  config.validate();
  const std::size_t d = config.d;
  auto find = [&](const std::string& name, std::size_t rows,
                  std::size_t cols) {
    const std::size_t slot = store.slot(name);
    expect_shape(store[slot], rows, cols);
    return slot;
  };
  VhanSlots s;
  s.proj_text = find("proj.text", d, config.text_dim);
  s.proj_visual = find("proj.visual", d, config.visual_dim);
  s.w_mu = find("init.w_mu", d, d);
  s.w_sigma = find("init.w_sigma", d, d);
  for (std::size_t l = 0; l < config.layers; ++l) {
    const std::string p = layer_prefix(l);
    s.layers.push_back({find(p + "w_x", d, d), find(p + "w_e", d, d),
                        find(p + "w_e_mu", d, d), find(p + "w_e_sigma", d, d),
                        find(p + "w_x_mu", d, d),
                        find(p + "w_x_sigma", d, d)});
  }
  return s;
}

std::vector<double> effective_variance(std::span<const double> sigma_raw,
                                       double eps) {
  std::vector<double> out(sigma_raw.size());
  for (std::size_t i = 0; i < sigma_raw.size(); ++i) {
    out[i] = softplus(sigma_raw[i]) + eps;
  }
  return out;
}

LayerState variational_init(const MultiModalHypergraph& graph,
                            const ParamStore& params, const VhanSlots& slots,
                            const VhanConfig& config) {
  const std::size_t n = graph.node_count();
  const std::size_t m = graph.edge_count();
  const std::size_t d = config.d;
  const Tensor& w_mu = params[slots.w_mu].value;
  const Tensor& w_sigma = params[slots.w_sigma].value;

  LayerState s{{Tensor({n, d}), Tensor({n, d})},
               {Tensor({m, d}), Tensor({m, d})}};
  std::vector<double> projected(d);
  for (std::size_t i = 0; i < n; ++i) {
    const Node& node = graph.node(i);
    const bool text = node.modality == Modality::Text;
    const Tensor& proj =
        params[text ? slots.proj_text : slots.proj_visual].value;
    if (node.feature->size() != proj.cols()) {
      throw DimensionError("node " + to_string(node.kind) + " feature has " +
                           std::to_string(node.feature->size()) +
                           " values, expected " +
                           std::to_string(proj.cols()) +
                           (text ? " (text)" : " (visual)"));
    }
    kernels::gemv(proj.values(), d, proj.cols(), *node.feature, projected);
    kernels::gemv(w_mu.values(), d, d, projected, s.nodes.mu.row(i));
    kernels::gemv(w_sigma.values(), d, d, projected, s.nodes.sigma_raw.row(i));
  }
  for (std::size_t j = 0; j < m; ++j) {
    const auto& members = graph.edge(j).members;
    const double inv = 1.0 / static_cast<double>(members.size());
    for (std::size_t i : members) {
      kernels::axpy(inv, s.nodes.mu.row(i), s.edges.mu.row(j));
      kernels::axpy(inv, s.nodes.sigma_raw.row(i), s.edges.sigma_raw.row(j));
    }
  }
  check_finite(s.nodes.mu.values(), "layer 0 node means");
  check_finite(s.nodes.sigma_raw.values(), "layer 0 node variances");
  return s;
}

std::vector<double> edge_attention(const Hyperedge& edge, const Tensor& node_mu,
                                   std::span<const double> edge_mu,
                                   const Tensor& w_x, const Tensor& w_e,
                                   std::size_t heads) {
  if (edge.members.empty()) {
    throw InvalidHyperedgeError("attention over an empty hyperedge");
  }
  const std::size_t d = w_x.rows();
  const std::size_t dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<double> key(d);
  kernels::gemv(w_e.values(), d, w_e.cols(), edge_mu, key);

  const std::size_t count = edge.members.size();
  std::vector<double> out(count * heads);
  std::vector<double> query(d);
  for (std::size_t p = 0; p < count; ++p) {
    kernels::gemv(w_x.values(), d, w_x.cols(), node_mu.row(edge.members[p]),
                  query);
    for (std::size_t h = 0; h < heads; ++h) {
      out[p * heads + h] =
          kernels::dot(head_slice(std::span<const double>(key), h, dh),
                       head_slice(std::span<const double>(query), h, dh)) *
          scale;
    }
  }
  std::vector<double> column(count);
  for (std::size_t h = 0; h < heads; ++h) {
    for (std::size_t p = 0; p < count; ++p) column[p] = out[p * heads + h];
    check_finite(column, "attention scores");
    kernels::softmax_inplace(column);
    for (std::size_t p = 0; p < count; ++p) out[p * heads + h] = column[p];
  }
  return out;
}

LayerState layer_forward(const MultiModalHypergraph& graph,
                         const LayerState& in, const ParamStore& params,
                         const LayerSlots& slots, const VhanConfig& config,
                         Mode mode, Rng* rng, bool apply_dropout,
                         LayerCache* cache) {
  const std::size_t n = graph.node_count();
  const std::size_t m = graph.edge_count();
  const std::size_t d = config.d;
  const std::size_t heads = config.heads;
  const std::size_t dh = config.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const TableIndex at{n, heads};

  LayerCache local;
  LayerCache& c = cache ? *cache : local;
  c.q = project_rows(params[slots.w_x].value, in.nodes.mu);
  c.k = project_rows(params[slots.w_e].value, in.edges.mu);

  // Scores on every incidence pair, then the two softmax groupings.
  std::vector<double> score(m * n * heads, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i : graph.edge(j).members) {
      for (std::size_t h = 0; h < heads; ++h) {
        score[at(j, i, h)] =
            kernels::dot(head_slice(c.k.row(j), h, dh),
                         head_slice(c.q.row(i), h, dh)) *
            scale;
      }
    }
  }
  check_finite(score, "attention scores");

  c.alpha.assign(m * n * heads, 0.0);
  c.beta.assign(m * n * heads, 0.0);
  std::vector<double> group;
  for (std::size_t j = 0; j < m; ++j) {
    const auto& members = graph.edge(j).members;
    for (std::size_t h = 0; h < heads; ++h) {
      group.clear();
      for (std::size_t i : members) group.push_back(score[at(j, i, h)]);
      kernels::softmax_inplace(group);
      for (std::size_t p = 0; p < members.size(); ++p) {
        c.alpha[at(j, members[p], h)] = group[p];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto incident = graph.edges_of(i);
    if (incident.empty()) continue;
    for (std::size_t h = 0; h < heads; ++h) {
      group.clear();
      for (std::size_t j : incident) group.push_back(score[at(j, i, h)]);
      kernels::softmax_inplace(group);
      for (std::size_t p = 0; p < incident.size(); ++p) {
        c.beta[at(incident[p], i, h)] = group[p];
      }
    }
  }

  // Attention-weighted aggregation, head slice by head slice.
  c.edge_agg_mu = Tensor({m, d});
  c.edge_agg_sigma = Tensor({m, d});
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i : graph.edge(j).members) {
      for (std::size_t h = 0; h < heads; ++h) {
        const double a = c.alpha[at(j, i, h)];
        kernels::axpy(a, head_slice(in.nodes.mu.row(i), h, dh),
                      head_slice(c.edge_agg_mu.row(j), h, dh));
        kernels::axpy(a * a, head_slice(in.nodes.sigma_raw.row(i), h, dh),
                      head_slice(c.edge_agg_sigma.row(j), h, dh));
      }
    }
  }
  c.node_agg_mu = Tensor({n, d});
  c.node_agg_sigma = Tensor({n, d});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : graph.edges_of(i)) {
      for (std::size_t h = 0; h < heads; ++h) {
        const double b = c.beta[at(j, i, h)];
        kernels::axpy(b, head_slice(in.edges.mu.row(j), h, dh),
                      head_slice(c.node_agg_mu.row(i), h, dh));
        kernels::axpy(b * b, head_slice(in.edges.sigma_raw.row(j), h, dh),
                      head_slice(c.node_agg_sigma.row(i), h, dh));
      }
    }
  }

  auto activate = [](Tensor z) {
    for (double& v : z.values()) v = logistic(v);
    return z;
  };
  c.edge_act_mu = activate(project_rows(params[slots.w_e_mu].value, c.edge_agg_mu));
  c.edge_act_sigma =
      activate(project_rows(params[slots.w_e_sigma].value, c.edge_agg_sigma));
  c.node_act_mu = activate(project_rows(params[slots.w_x_mu].value, c.node_agg_mu));
  c.node_act_sigma =
      activate(project_rows(params[slots.w_x_sigma].value, c.node_agg_sigma));

  LayerState out = in;
  kernels::axpy(1.0, c.edge_act_mu.values(), out.edges.mu.values());
  kernels::axpy(1.0, c.edge_act_sigma.values(), out.edges.sigma_raw.values());
  kernels::axpy(1.0, c.node_act_mu.values(), out.nodes.mu.values());
  kernels::axpy(1.0, c.node_act_sigma.values(), out.nodes.sigma_raw.values());

  c.dropout_mask.clear();
  if (mode == Mode::Train && apply_dropout && config.dropout > 0.0 && rng) {
    const double keep_scale = 1.0 / (1.0 - config.dropout);
    c.dropout_mask.resize(n * d);
    auto mu = out.nodes.mu.values();
    for (std::size_t t = 0; t < n * d; ++t) {
      c.dropout_mask[t] = rng->uniform() < config.dropout ? 0.0 : keep_scale;
      mu[t] *= c.dropout_mask[t];
    }
  }

  check_finite(out.nodes.mu.values(), "layer node means");
  check_finite(out.nodes.sigma_raw.values(), "layer node variances");
  check_finite(out.edges.mu.values(), "layer edge means");
  check_finite(out.edges.sigma_raw.values(), "layer edge variances");
  return out;
}

ForwardTrace forward_trace(const MultiModalHypergraph& graph,
                           const ParamStore& params, const VhanSlots& slots,
                           const VhanConfig& config, Mode mode, Rng* rng) {
  ForwardTrace trace;
  trace.states.reserve(config.layers + 1);
  trace.caches.resize(config.layers);
  trace.states.push_back(variational_init(graph, params, slots, config));
  for (std::size_t l = 0; l < config.layers; ++l) {
    const bool between_layers = l + 1 < config.layers;
    try {
      trace.states.push_back(layer_forward(graph, trace.states.back(), params,
                                           slots.layers[l], config, mode, rng,
                                           between_layers, &trace.caches[l]));
    } catch (const NumericInstabilityError& e) {
      throw NumericInstabilityError("layer " + std::to_string(l) + ": " +
                                    e.what());
    }
  }
  return trace;
}

GaussianStates forward(const MultiModalHypergraph& graph,
                       const ParamStore& params, const VhanSlots& slots,
                       const VhanConfig& config, Mode mode, Rng* rng) {
  LayerState state = variational_init(graph, params, slots, config);
  for (std::size_t l = 0; l < config.layers; ++l) {
    try {
      state = layer_forward(graph, state, params, slots.layers[l], config,
                            mode, rng, l + 1 < config.layers);
    } catch (const NumericInstabilityError& e) {
      throw NumericInstabilityError("layer " + std::to_string(l) + ": " +
                                    e.what());
    }
  }
  return std::move(state.nodes);
}

namespace {

// y = logistic(W a): returns dz = dy * y(1-y), adds dz a^T into dW and
// W^T dz into `d_agg` (one row per item).
void backprop_activation(const Tensor& w, const Tensor& act, const Tensor& agg,
                         const Tensor& d_out, std::span<double> d_w,
                         Tensor& d_agg) {
  const std::size_t d = w.rows();
  std::vector<double> dz(d);
  for (std::size_t r = 0; r < act.rows(); ++r) {
    const auto y = act.row(r);
    const auto dy = d_out.row(r);
    for (std::size_t c = 0; c < d; ++c) dz[c] = dy[c] * y[c] * (1.0 - y[c]);
    kernels::outer_acc(d_w, dz, agg.row(r));
    kernels::gemv_t_acc(w.values(), d, w.cols(), dz, d_agg.row(r));
  }
}

}  // namespace

void backward(const MultiModalHypergraph& graph, const ForwardTrace& trace,
              const ParamStore& params, const VhanSlots& slots,
              const VhanConfig& config, const Tensor& d_node_mu,
              const Tensor& d_node_sigma, GradientBuffer& grads) {
  const std::size_t n = graph.node_count();
  const std::size_t m = graph.edge_count();
  const std::size_t d = config.d;
  const std::size_t heads = config.heads;
  const std::size_t dh = config.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const TableIndex at{n, heads};

  // Gradients w.r.t. the current layer's outputs.
  Tensor dx_mu = d_node_mu;
  Tensor dx_sigma = d_node_sigma;
  Tensor de_mu({m, d});
  Tensor de_sigma({m, d});

  for (std::size_t l = config.layers; l-- > 0;) {
    const LayerCache& c = trace.caches[l];
    const LayerState& in = trace.states[l];
    const LayerSlots& ls = slots.layers[l];

    if (!c.dropout_mask.empty()) {
      auto v = dx_mu.values();
      for (std::size_t t = 0; t < v.size(); ++t) v[t] *= c.dropout_mask[t];
    }

    // Residual paths pass straight through.
    Tensor gx_mu = dx_mu, gx_sigma = dx_sigma;
    Tensor ge_mu = de_mu, ge_sigma = de_sigma;

    Tensor d_node_agg_mu({n, d}), d_node_agg_sigma({n, d});
    Tensor d_edge_agg_mu({m, d}), d_edge_agg_sigma({m, d});
    backprop_activation(params[ls.w_x_mu].value, c.node_act_mu, c.node_agg_mu,
                        dx_mu, grads[ls.w_x_mu], d_node_agg_mu);
    backprop_activation(params[ls.w_x_sigma].value, c.node_act_sigma,
                        c.node_agg_sigma, dx_sigma, grads[ls.w_x_sigma],
                        d_node_agg_sigma);
    backprop_activation(params[ls.w_e_mu].value, c.edge_act_mu, c.edge_agg_mu,
                        de_mu, grads[ls.w_e_mu], d_edge_agg_mu);
    backprop_activation(params[ls.w_e_sigma].value, c.edge_act_sigma,
                        c.edge_agg_sigma, de_sigma, grads[ls.w_e_sigma],
                        d_edge_agg_sigma);

    std::vector<double> d_alpha(m * n * heads, 0.0);
    std::vector<double> d_beta(m * n * heads, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j : graph.edges_of(i)) {
        for (std::size_t h = 0; h < heads; ++h) {
          const double b = c.beta[at(j, i, h)];
          const auto g_mu = head_slice(d_node_agg_mu.row(i), h, dh);
          const auto g_sigma = head_slice(d_node_agg_sigma.row(i), h, dh);
          d_beta[at(j, i, h)] =
              kernels::dot(g_mu, head_slice(in.edges.mu.row(j), h, dh)) +
              2.0 * b *
                  kernels::dot(g_sigma,
                               head_slice(in.edges.sigma_raw.row(j), h, dh));
          kernels::axpy(b, g_mu, head_slice(ge_mu.row(j), h, dh));
          kernels::axpy(b * b, g_sigma, head_slice(ge_sigma.row(j), h, dh));
        }
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i : graph.edge(j).members) {
        for (std::size_t h = 0; h < heads; ++h) {
          const double a = c.alpha[at(j, i, h)];
          const auto g_mu = head_slice(d_edge_agg_mu.row(j), h, dh);
          const auto g_sigma = head_slice(d_edge_agg_sigma.row(j), h, dh);
          d_alpha[at(j, i, h)] =
              kernels::dot(g_mu, head_slice(in.nodes.mu.row(i), h, dh)) +
              2.0 * a *
                  kernels::dot(g_sigma,
                               head_slice(in.nodes.sigma_raw.row(i), h, dh));
          kernels::axpy(a, g_mu, head_slice(gx_mu.row(i), h, dh));
          kernels::axpy(a * a, g_sigma, head_slice(gx_sigma.row(i), h, dh));
        }
      }
    }

    // Softmax backward for both groupings into one score gradient table.
    std::vector<double> d_score(m * n * heads, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      const auto& members = graph.edge(j).members;
      for (std::size_t h = 0; h < heads; ++h) {
        double inner = 0.0;
        for (std::size_t i : members) {
          inner += c.alpha[at(j, i, h)] * d_alpha[at(j, i, h)];
        }
        for (std::size_t i : members) {
          d_score[at(j, i, h)] +=
              c.alpha[at(j, i, h)] * (d_alpha[at(j, i, h)] - inner);
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto incident = graph.edges_of(i);
      for (std::size_t h = 0; h < heads; ++h) {
        double inner = 0.0;
        for (std::size_t j : incident) {
          inner += c.beta[at(j, i, h)] * d_beta[at(j, i, h)];
        }
        for (std::size_t j : incident) {
          d_score[at(j, i, h)] +=
              c.beta[at(j, i, h)] * (d_beta[at(j, i, h)] - inner);
        }
      }
    }

    Tensor dq({n, d}), dk({m, d});
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i : graph.edge(j).members) {
        for (std::size_t h = 0; h < heads; ++h) {
          const double g = d_score[at(j, i, h)] * scale;
          kernels::axpy(g, head_slice(c.k.row(j), h, dh),
                        head_slice(dq.row(i), h, dh));
          kernels::axpy(g, head_slice(c.q.row(i), h, dh),
                        head_slice(dk.row(j), h, dh));
        }
      }
    }
    const Tensor& w_x = params[ls.w_x].value;
    const Tensor& w_e = params[ls.w_e].value;
    for (std::size_t i = 0; i < n; ++i) {
      kernels::outer_acc(grads[ls.w_x], dq.row(i), in.nodes.mu.row(i));
      kernels::gemv_t_acc(w_x.values(), d, d, dq.row(i), gx_mu.row(i));
    }
    for (std::size_t j = 0; j < m; ++j) {
      kernels::outer_acc(grads[ls.w_e], dk.row(j), in.edges.mu.row(j));
      kernels::gemv_t_acc(w_e.values(), d, d, dk.row(j), ge_mu.row(j));
    }

    dx_mu = std::move(gx_mu);
    dx_sigma = std::move(gx_sigma);
    de_mu = std::move(ge_mu);
    de_sigma = std::move(ge_sigma);
  }

  // Layer-0 edges are member means of layer-0 nodes.
  for (std::size_t j = 0; j < m; ++j) {
    const auto& members = graph.edge(j).members;
    const double inv = 1.0 / static_cast<double>(members.size());
    for (std::size_t i : members) {
      kernels::axpy(inv, de_mu.row(j), dx_mu.row(i));
      kernels::axpy(inv, de_sigma.row(j), dx_sigma.row(i));
    }
  }

  const Tensor& w_mu = params[slots.w_mu].value;
  const Tensor& w_sigma = params[slots.w_sigma].value;
  std::vector<double> projected(d);
  std::vector<double> d_projected(d);
  for (std::size_t i = 0; i < n; ++i) {
    const Node& node = graph.node(i);
    const std::size_t proj_slot =
        node.modality == Modality::Text ? slots.proj_text : slots.proj_visual;
    const Tensor& proj = params[proj_slot].value;
    kernels::gemv(proj.values(), d, proj.cols(), *node.feature, projected);

    kernels::outer_acc(grads[slots.w_mu], dx_mu.row(i), projected);
    kernels::outer_acc(grads[slots.w_sigma], dx_sigma.row(i), projected);
    std::fill(d_projected.begin(), d_projected.end(), 0.0);
    kernels::gemv_t_acc(w_mu.values(), d, d, dx_mu.row(i), d_projected);
    kernels::gemv_t_acc(w_sigma.values(), d, d, dx_sigma.row(i), d_projected);
    kernels::outer_acc(grads[proj_slot], d_projected, *node.feature);
  }
}

std::vector<double> readout(std::span<const double> head_mu,
                            std::span<const double> head_sigma_raw,
                            std::span<const double> tail_mu,
                            std::span<const double> tail_sigma_raw,
                            double eps) {
  const std::size_t d = head_mu.size();
  if (head_sigma_raw.size() != d || tail_mu.size() != d ||
      tail_sigma_raw.size() != d) {
    throw DimensionError("readout: head/tail state dimensions differ");
  }
  std::vector<double> out;
  out.reserve(4 * d);
  out.insert(out.end(), head_mu.begin(), head_mu.end());
  for (double s : head_sigma_raw) out.push_back(softplus(s) + eps);
  out.insert(out.end(), tail_mu.begin(), tail_mu.end());
  for (double s : tail_sigma_raw) out.push_back(softplus(s) + eps);
  return out;
}

}  // namespace vmhan
