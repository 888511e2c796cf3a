// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vmhan/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vmhan/error.hpp"
#include "vmhan/kernels.hpp"
#include "vmhan/tensor.hpp"

namespace vmhan {

std::string to_string(NodeKind kind) {
  switch (kind.tag) {
    case NodeKind::Tag::Head:
      return "head";
    case NodeKind::Tag::Tail:
      return "tail";
    case NodeKind::Tag::Image:
      return "image";
    case NodeKind::Tag::Object:
      return "object" + std::to_string(kind.slot);
  }
  return "?";
}

std::string to_string(HyperedgeKind kind) {
  switch (kind) {
    case HyperedgeKind::Global:
      return "global";
    case HyperedgeKind::Textual:
      return "textual";
    case HyperedgeKind::Visual:
      return "visual";
    case HyperedgeKind::HeadVisual:
      return "head-visual";
    case HyperedgeKind::TailVisual:
      return "tail-visual";
  }
  return "?";
}

MultiModalHypergraph::MultiModalHypergraph(std::vector<Node> nodes,
                                           std::vector<Hyperedge> edges)
    : nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      node_edges_(nodes_.size()) {
  for (std::size_t j = 0; j < edges_.size(); ++j) {
    if (edges_[j].members.empty()) {
      throw InvalidHyperedgeError("hyperedge " + to_string(edges_[j].kind) +
                                  " has no members");
    }
    for (std::size_t i : edges_[j].members) {
      if (i >= nodes_.size()) {
        throw DimensionError("hyperedge member " + std::to_string(i) +
                             " out of range");
      }
      node_edges_[i].push_back(j);
    }
  }
}

std::vector<std::size_t> IncidenceMatrix::column_sums() const {
  std::vector<std::size_t> sums(m_, 0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < m_; ++j) sums[j] += (*this)(i, j);
  return sums;
}

std::vector<std::size_t> IncidenceMatrix::row_sums() const {
  std::vector<std::size_t> sums(n_, 0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < m_; ++j) sums[i] += (*this)(i, j);
  return sums;
}

std::size_t IncidenceMatrix::total() const {
  return static_cast<std::size_t>(
      std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

MultiModalHypergraph build_hypergraph(Feature head, Feature tail,
                                      Feature image,
                                      std::vector<Feature> objects,
                                      const HypergraphOptions& options) {
  auto require = [](const Feature& f, const char* what) {
    if (!f) throw ValidationError(std::string("missing ") + what + " feature");
    check_finite(*f, what);
  };
  require(head, "head");
  require(tail, "tail");
  require(image, "image");
  for (const auto& o : objects) require(o, "object");

  const std::size_t k = objects.size();
  std::vector<Node> nodes;
  nodes.reserve(k + 3);
  nodes.push_back({NodeKind::head(), Modality::Text, std::move(head)});
  nodes.push_back({NodeKind::tail(), Modality::Text, std::move(tail)});
  nodes.push_back({NodeKind::image(), Modality::Visual, std::move(image)});
  for (std::size_t s = 0; s < k; ++s) {
    nodes.push_back({NodeKind::object(s), Modality::Visual, std::move(objects[s])});
  }

  const std::size_t n = nodes.size();
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> visual(all.begin() + 2, all.end());

  std::vector<Hyperedge> edges;
  edges.push_back({HyperedgeKind::Global, all});
  edges.push_back({HyperedgeKind::Textual, {0, 1}});
  edges.push_back({HyperedgeKind::Visual, visual});
  if (options.inter_modal) {
    std::vector<std::size_t> hv{0};
    hv.insert(hv.end(), visual.begin(), visual.end());
    std::vector<std::size_t> tv{1};
    tv.insert(tv.end(), visual.begin(), visual.end());
    edges.push_back({HyperedgeKind::HeadVisual, std::move(hv)});
    edges.push_back({HyperedgeKind::TailVisual, std::move(tv)});
  }
  return MultiModalHypergraph(std::move(nodes), std::move(edges));
}

IncidenceMatrix incidence(const MultiModalHypergraph& graph) {
  IncidenceMatrix h(graph.node_count(), graph.edge_count());
  for (std::size_t j = 0; j < graph.edge_count(); ++j)
    for (std::size_t i : graph.edge(j).members) h(i, j) = 1;
  return h;
}

double cosine_similarity(std::span<const double> a,
                         std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("cosine_similarity: length " +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
  const double na = std::sqrt(kernels::dot(a, a));
  const double nb = std::sqrt(kernels::dot(b, b));
  if (na == 0.0 || nb == 0.0) return -1.0;
  return kernels::dot(a, b) / (na * nb);
}

std::vector<std::size_t> top_k_by_relevance(std::span<const double> relevance,
                                            std::size_t k) {
  std::vector<std::size_t> order(relevance.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return relevance[a] > relevance[b];
                   });
  order.resize(std::min(k, order.size()));
  return order;
}

std::vector<std::size_t> select_objects(
    std::span<const double> head, std::span<const double> tail,
    std::span<const ObjectCandidate> candidates, std::size_t k) {
  if (head.size() != tail.size()) {
    throw DimensionError("select_objects: head/tail dimensions differ");
  }
  std::vector<double> anchor(head.size());
  for (std::size_t i = 0; i < head.size(); ++i) {
    anchor[i] = 0.5 * (head[i] + tail[i]);
  }

  std::vector<double> relevance;
  relevance.reserve(candidates.size());
  const bool same_space =
      !candidates.empty() && candidates.front().feature->size() == head.size();
  for (const auto& c : candidates) {
    if (c.feature->size() != candidates.front().feature->size()) {
      throw DimensionError("select_objects: candidate dimensions differ");
    }
    relevance.push_back(same_space ? cosine_similarity(*c.feature, anchor)
                                   : c.detector_score);
  }
  return top_k_by_relevance(relevance, k);
}

}  // namespace vmhan
