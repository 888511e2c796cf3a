// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <memory>

#include "doctest.h"
#include "vmhan/error.hpp"
#include "vmhan/hypergraph.hpp"
#include "vmhan/probe.hpp"
#include "vmhan/rng.hpp"

using namespace vmhan;

namespace {

Feature feat(std::vector<double> v) {
  return std::make_shared<const std::vector<double>>(std::move(v));
}

MultiModalHypergraph graph_with(std::size_t k, bool inter_modal = true) {
  std::vector<Feature> objects;
  for (std::size_t s = 0; s < k; ++s) objects.push_back(feat({double(s), 1, 2}));
  return build_hypergraph(feat({1, 0}), feat({0, 1}), feat({1, 1, 1}),
                          std::move(objects), {inter_modal});
}

}  // namespace

TEST_CASE("hypergraph: three objects give 6 nodes, 5 edges, 22 incidences") {
  const auto g = graph_with(3);
  CHECK(g.node_count() == 6);
  CHECK(g.edge_count() == 5);
  const auto h = incidence(g);
  CHECK(h.total() == 22);
  CHECK(h.column_sums() == std::vector<std::size_t>{6, 2, 4, 5, 5});
  CHECK(g.edge(3).kind == HyperedgeKind::HeadVisual);
  CHECK(g.edge(3).members == std::vector<std::size_t>{0, 2, 3, 4, 5});
  CHECK(g.edge(4).members == std::vector<std::size_t>{1, 2, 3, 4, 5});
}

TEST_CASE("hypergraph: no objects") {
  const auto g = graph_with(0);
  const auto h = incidence(g);
  CHECK(h.column_sums() == std::vector<std::size_t>{3, 2, 1, 2, 2});
  auto row = [&](std::size_t i) {
    std::vector<int> r;
    for (std::size_t j = 0; j < h.cols(); ++j) r.push_back(h(i, j));
    return r;
  };
  CHECK(row(MultiModalHypergraph::kHead) == std::vector<int>{1, 1, 0, 1, 0});
  CHECK(row(MultiModalHypergraph::kTail) == std::vector<int>{1, 1, 0, 0, 1});
  CHECK(row(MultiModalHypergraph::kImage) == std::vector<int>{1, 0, 1, 1, 1});
}

TEST_CASE("hypergraph: incidence agrees with edges_of for every k") {
  for (std::size_t k = 0; k <= 6; ++k) {
    for (bool inter : {true, false}) {
      const auto g = graph_with(k, inter);
      const auto h = incidence(g);
      CHECK(g.edge_count() == (inter ? 5u : 3u));
      std::size_t total = 0;
      for (std::size_t i = 0; i < g.node_count(); ++i) {
        std::vector<std::size_t> from_matrix;
        for (std::size_t j = 0; j < g.edge_count(); ++j) {
          if (h(i, j)) from_matrix.push_back(j);
        }
        const auto listed = g.edges_of(i);
        CHECK(from_matrix == std::vector<std::size_t>(listed.begin(), listed.end()));
        total += from_matrix.size();
        // Every node is in the global edge and in at least one other.
        CHECK(from_matrix.size() >= 2);
      }
      CHECK(total == h.total());
      const std::size_t expected =
          (k + 3) + 2 + (k + 1) + (inter ? 2 * (k + 2) : 0);
      CHECK(total == expected);
    }
  }
}

TEST_CASE("hypergraph: node kinds and modalities follow the fixed order") {
  const auto g = graph_with(2);
  CHECK(g.node(0).kind == NodeKind::head());
  CHECK(g.node(1).kind == NodeKind::tail());
  CHECK(g.node(2).kind == NodeKind::image());
  CHECK(g.node(4).kind == NodeKind::object(1));
  CHECK(g.node(1).modality == Modality::Text);
  CHECK(g.node(3).modality == Modality::Visual);
  CHECK(to_string(NodeKind::object(1)) == "object1");
  CHECK(to_string(HyperedgeKind::TailVisual) == "tail-visual");
}

TEST_CASE("hypergraph: missing or non-finite features are rejected") {
  CHECK_THROWS_AS(build_hypergraph(nullptr, feat({1}), feat({1}), {}), ValidationError);
  CHECK_THROWS_AS(build_hypergraph(feat({1}), feat({1}), feat({1}), {feat({NAN})}),
                  NumericInstabilityError);
}

TEST_CASE("hypergraph: an edge with no members is invalid") {
  std::vector<Node> nodes{{NodeKind::head(), Modality::Text, feat({1})}};
  CHECK_THROWS_AS(MultiModalHypergraph(nodes, {{HyperedgeKind::Global, {}}}),
                  InvalidHyperedgeError);
  CHECK_THROWS_AS(MultiModalHypergraph(nodes, {{HyperedgeKind::Global, {0, 4}}}),
                  DimensionError);
}

TEST_CASE("select_objects: cosine ranking with lower index on ties") {
  // head + tail mean is (1, 0); candidates at fixed cosines to it.
  const std::vector<double> head{1, 0}, tail{1, 0};
  auto at_cos = [](double c) { return feat({c, std::sqrt(1 - c * c)}); };
  const std::vector<ObjectCandidate> cands{
      {at_cos(0.9), 0.0}, {at_cos(0.1), 0.0}, {at_cos(0.5), 0.0}, {at_cos(0.5), 0.0}};
  CHECK(select_objects(head, tail, cands, 2) == std::vector<std::size_t>{0, 2});
  CHECK(select_objects(head, tail, cands, 3) == std::vector<std::size_t>{0, 2, 3});
  CHECK(select_objects(head, tail, cands, 10).size() == 4);
  CHECK(select_objects(head, tail, cands, 0).empty());
}

TEST_CASE("select_objects: detector scores rank when dimensions differ") {
  const std::vector<double> head{1, 0}, tail{0, 1};
  const std::vector<ObjectCandidate> cands{
      {feat({1, 2, 3}), 0.2}, {feat({1, 2, 3}), 0.9}, {feat({1, 2, 3}), 0.5}};
  CHECK(select_objects(head, tail, cands, 2) == std::vector<std::size_t>{1, 2});
}

TEST_CASE("top_k_by_relevance and cosine_similarity basics") {
  const std::vector<double> rel{0.9, 0.1, 0.5, 0.5};
  CHECK(top_k_by_relevance(rel, 2) == std::vector<std::size_t>{0, 2});
  const std::vector<double> a{1, 0}, b{0, 2}, z{0, 0};
  CHECK(cosine_similarity(a, a) == doctest::Approx(1.0));
  CHECK(cosine_similarity(a, b) == 0.0);
  CHECK(cosine_similarity(a, z) == -1.0);
  const std::vector<double> c{1, 2, 3};
  CHECK_THROWS_AS(cosine_similarity(a, c), DimensionError);
}

TEST_CASE("random_hypergraph: shapes follow the requested dimensions") {
  Rng rng(4);
  const auto g = random_hypergraph(rng, 2, 5, 7);
  CHECK(g.node_count() == 5);
  CHECK(g.node(0).feature->size() == 5);
  CHECK(g.node(4).feature->size() == 7);
}
