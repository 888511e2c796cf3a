// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

// Random small instances for self-checks (CLI gradcheck, property tests).

#pragma once

#include <cstddef>
#include <cstdint>

#include "vmhan/gradcheck.hpp"
#include "vmhan/hypergraph.hpp"
#include "vmhan/model.hpp"
#include "vmhan/rng.hpp"

namespace vmhan {

/// Hypergraph with k objects whose features are standard normal draws.
MultiModalHypergraph random_hypergraph(Rng& rng, std::size_t k,
                                       std::size_t text_dim,
                                       std::size_t visual_dim,
                                       const HypergraphOptions& options = {});

struct ModelGradcheckCase {
  std::size_t d = 8;
  std::size_t k = 3;
  std::size_t layers = 1;
  std::size_t heads = 1;
  std::uint64_t seed = 1;
  double step = 1e-5;
  double tol = 1e-4;
  std::size_t text_dim = 12;
  std::size_t visual_dim = 20;
  std::size_t relations = 3;  // excluding none
  LossWeights weights;
};

/// Builds a fresh model (dropout off) and one random instance from
/// `seed`, then checks d(total loss)/d(every parameter) by central
/// differences. Reconstruction targets are frozen at the unperturbed
/// parameters, matching how the analytic gradient treats them.
GradcheckReport gradcheck_model(const ModelGradcheckCase& c);

}  // namespace vmhan
