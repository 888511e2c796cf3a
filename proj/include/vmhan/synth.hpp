// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

// Synthetic relation-extraction corpora with planted structure.
//
// Every node feature is a hidden latent pushed through a fixed random basis
// (one basis per modality) plus Gaussian noise:
//   x = scale * (B z + noise * xi) / sqrt(D),  B entries ~ N(0, 1),
//   xi ~ N(0, I), with D the feature dimension, so a feature's norm is
//   about scale times its latent norm.
//
// cross mode: entities come in two types. The head's latent is the one-hot
//   code of its type h (first two of latent_dim slots) and the tail always
//   has the other type. Every visual node has latent [0 ; one-hot(o)] for
//   one object class o. The label is (o + h) mod R. Neither the object class
//   nor the entity-type pair alone determines it, and since the pair is
//   always {0, 1} a pool over both entities carries no trace of h.
// text mode: the label is argmax_r P[r] . [z_head ; z_tail] with
//   z ~ N(0, I) of width latent_dim; visual latents are zero, so visual
//   features are pure noise. Samples whose best-vs-second score margin is
//   below `min_margin` are rejected.
//
// In both modes a sample whose class already holds ceil(n / R) samples is
// rejected, so no class exceeds that cap.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vmhan/dataio.hpp"
#include "vmhan/tensor.hpp"

namespace vmhan {

enum class SynthMode { Cross, Text };

SynthMode parse_synth_mode(const std::string& name);
std::string to_string(SynthMode mode);

struct SynthConfig {
  std::size_t n = 500;
  std::size_t k = 3;
  std::size_t relations = 5;
  std::size_t text_dim = 768;
  std::size_t visual_dim = 4096;
  SynthMode mode = SynthMode::Cross;
  double noise = 0.1;
  double scale = 1.0;
  std::uint64_t seed = 1;
  std::size_t latent_dim = 4;
  double min_margin = 0.25;

  void validate() const;
};

/// The generator's hidden state, exposed for oracle checks.
struct SynthHidden {
  Tensor text_basis;    // text_dim x latent_dim
  Tensor visual_basis;  // visual_dim x (latent_dim + relations)
  Tensor prototypes;    // relations x 2*latent_dim, text mode only
};

SynthHidden make_synth_hidden(const SynthConfig& config);

/// Label the hidden rule assigns to the given latents. Cross mode reads the
/// head's type and the class block of objects[0]; text mode ignores
/// `objects`.
std::size_t synth_rule_label(const SynthConfig& config,
                             const SynthHidden& hidden,
                             std::span<const double> head,
                             std::span<const double> tail,
                             const std::vector<std::vector<double>>& objects);

/// Least-squares latent estimate of a feature vector under `basis`.
std::vector<double> recover_latent(const Tensor& basis,
                                   std::span<const double> feature);

struct SynthOutput {
  std::filesystem::path manifest;
  std::filesystem::path vocabulary;
  std::vector<std::size_t> label_counts;
};

/// Writes manifest.jsonl, relations.txt and features/ under `out_dir`
/// (created if needed). Relation labels are rel0..rel{R-1} plus none.
SynthOutput generate_synth(const SynthConfig& config,
                           const std::filesystem::path& out_dir);

/// Splits a manifest into consecutive parts of the given sizes, written as
/// <stem>.part<i>.jsonl beside it. Returns the part paths.
std::vector<std::filesystem::path> split_manifest(
    const std::filesystem::path& manifest, std::span<const std::size_t> sizes);

}  // namespace vmhan
