// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vmhan/probe.hpp"

#include <memory>
#include <vector>

namespace vmhan {

namespace {

Feature normal_feature(Rng& rng, std::size_t dim) {
  auto v = std::make_shared<std::vector<double>>(dim);
  for (double& x : *v) x = rng.normal();
  return v;
}

}  // namespace

MultiModalHypergraph random_hypergraph(Rng& rng, std::size_t k,
                                       std::size_t text_dim,
                                       std::size_t visual_dim,
                                       const HypergraphOptions& options) {
  Feature head = normal_feature(rng, text_dim);
  Feature tail = normal_feature(rng, text_dim);
  Feature image = normal_feature(rng, visual_dim);
  std::vector<Feature> objects;
  for (std::size_t o = 0; o < k; ++o) {
    objects.push_back(normal_feature(rng, visual_dim));
  }
  return build_hypergraph(head, tail, image, std::move(objects), options);
}

GradcheckReport gradcheck_model(const ModelGradcheckCase& c) {
  ModelConfig config;
  config.encoder.d = c.d;
  config.encoder.layers = c.layers;
  config.encoder.heads = c.heads;
  config.encoder.dropout = 0.0;
  config.encoder.text_dim = c.text_dim;
  config.encoder.visual_dim = c.visual_dim;
  config.max_objects = c.k;
  std::vector<std::string> labels;
  for (std::size_t r = 0; r < c.relations; ++r) {
    labels.push_back("r" + std::to_string(r));
  }
  config.relations = RelationVocabulary(labels);

  VmHanModel model(config, c.seed);
  Rng rng = Rng(c.seed).fork(0x4752414443ULL);
  const auto graph =
      random_hypergraph(rng, c.k, c.text_dim, c.visual_dim);
  const std::size_t gold = rng.below(config.relations.size());

  ParamStore& params = model.params();
  GradientBuffer grads(params);
  model.loss_and_gradient(graph, gold, c.weights, Mode::Eval, nullptr, grads);
  params.zero_grads();
  grads.add_to(params);

  const ReconTargets targets = model.recon_targets(graph);
  return finite_diff_gradcheck(
      [&](const ParamStore&) {
        return model.loss(graph, gold, c.weights, Mode::Eval, nullptr, &targets)
            .total;
      },
      params, c.step, c.tol);
}

}  // namespace vmhan
