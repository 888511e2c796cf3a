// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace vmhan {

enum class Modality : std::uint8_t { Text, Visual };

struct NodeKind {
  enum class Tag : std::uint8_t { Head, Tail, Image, Object };
  Tag tag;
  std::size_t slot = 0;  // object slot, meaningful for Tag::Object only

  static NodeKind head() { return {Tag::Head}; }
  static NodeKind tail() { return {Tag::Tail}; }
  static NodeKind image() { return {Tag::Image}; }
  static NodeKind object(std::size_t s) { return {Tag::Object, s}; }

  friend bool operator==(const NodeKind&, const NodeKind&) = default;
};

enum class HyperedgeKind : std::uint8_t {
  Global,
  Textual,
  Visual,
  HeadVisual,
  TailVisual,
};

std::string to_string(NodeKind kind);
std::string to_string(HyperedgeKind kind);

using Feature = std::shared_ptr<const std::vector<double>>;

struct Node {
  NodeKind kind;
  Modality modality;
  Feature feature;
};

struct Hyperedge {
  HyperedgeKind kind;
  std::vector<std::size_t> members;  // ascending node indices
};

struct HypergraphOptions {
  /// Build the HeadVisual / TailVisual edges. Off only for ablation runs.
  bool inter_modal = true;
};

/// One instance's hypergraph. Node order is fixed:
/// [Head, Tail, Image, Object(0), ..., Object(k-1)].
/// Edge order follows HyperedgeKind declaration order.
class MultiModalHypergraph {
 public:
  MultiModalHypergraph(std::vector<Node> nodes, std::vector<Hyperedge> edges);

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Hyperedge> edges() const { return edges_; }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  const Hyperedge& edge(std::size_t j) const { return edges_[j]; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t object_count() const { return nodes_.size() - 3; }

  /// Edge indices containing node i, ascending.
  std::span<const std::size_t> edges_of(std::size_t i) const {
    return node_edges_[i];
  }

  static constexpr std::size_t kHead = 0;
  static constexpr std::size_t kTail = 1;
  static constexpr std::size_t kImage = 2;
  static constexpr std::size_t kFirstObject = 3;

 private:
  std::vector<Node> nodes_;
  std::vector<Hyperedge> edges_;
  std::vector<std::vector<std::size_t>> node_edges_;
};

/// n x m 0/1 matrix, H(i, j) = 1 iff node i belongs to edge j.
class IncidenceMatrix {
 public:
  IncidenceMatrix(std::size_t n, std::size_t m)
      : n_(n), m_(m), cells_(n * m, 0) {}

  std::size_t rows() const { return n_; }
  std::size_t cols() const { return m_; }
  std::uint8_t operator()(std::size_t i, std::size_t j) const {
    return cells_[i * m_ + j];
  }
  std::uint8_t& operator()(std::size_t i, std::size_t j) {
    return cells_[i * m_ + j];
  }

  std::vector<std::size_t> column_sums() const;
  std::vector<std::size_t> row_sums() const;
  std::size_t total() const;

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<std::uint8_t> cells_;
};

MultiModalHypergraph build_hypergraph(Feature head, Feature tail,
                                      Feature image,
                                      std::vector<Feature> objects,
                                      const HypergraphOptions& options = {});

IncidenceMatrix incidence(const MultiModalHypergraph& graph);

struct ObjectCandidate {
  Feature feature;
  double detector_score = 0.0;
};

/// Cosine similarity; -1 when either vector has zero norm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Indices of the `k` largest relevance values, descending, ties broken by
/// lower index. Returns every index when fewer than k exist.
std::vector<std::size_t> top_k_by_relevance(std::span<const double> relevance,
                                            std::size_t k);

/// Picks the k candidates most relevant to the entity pair. Relevance is the
/// cosine similarity between a candidate and the mean of the head and tail
/// features when the dimensions agree; otherwise the detector score.
std::vector<std::size_t> select_objects(std::span<const double> head,
                                        std::span<const double> tail,
                                        std::span<const ObjectCandidate> candidates,
                                        std::size_t k);

}  // namespace vmhan
