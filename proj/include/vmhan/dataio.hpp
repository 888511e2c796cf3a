// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

// On-disk formats.
//
// Feature file (all integers unsigned 32-bit little-endian):
//   "VMHF" | version=1 | dtype (1 = f64, 2 = f32) | rank (1 or 2) |
//   extents[rank] | row-major little-endian payload
//
// Manifest: one JSON object per line, feature paths relative to the
// manifest's directory:
//   {"id", "head": {"text", "span": [b, e]}, "tail": {...}, "text",
//    "relation", "head_feature", "tail_feature", "image_feature",
//    "objects": [{"feature", "score"}, ...]}
//
// Vocabulary: one relation label per line; `none` is appended if absent.
//
// Model snapshot: "VMHS" | version=1 | u32 config length | key=value config
// text | u32 parameter count | per parameter: u32 name length, name,
// u64 block length, feature-file block (dtype f64).

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vmhan/model.hpp"
#include "vmhan/objective.hpp"
#include "vmhan/tensor.hpp"
#include "vmhan/trainer.hpp"

namespace vmhan {

enum class DType : std::uint32_t { F64 = 1, F32 = 2 };

inline constexpr std::uint32_t kFeatureVersion = 1;
inline constexpr std::uint32_t kSnapshotVersion = 1;

std::vector<std::uint8_t> encode_feature(const Tensor& tensor,
                                         DType dtype = DType::F64);
/// Parses a whole feature block; f32 payloads are widened to double.
Tensor decode_feature(std::span<const std::uint8_t> bytes,
                      std::string_view source = "feature");

void write_feature(const std::filesystem::path& path, const Tensor& tensor,
                   DType dtype = DType::F64);
Tensor read_feature(const std::filesystem::path& path);

/// Validates the header and total size of a feature file without decoding
/// the payload. Returns the extents.
std::vector<std::size_t> probe_feature(const std::filesystem::path& path);

struct EntityMention {
  std::string text;
  std::pair<std::size_t, std::size_t> span{0, 0};

  friend bool operator==(const EntityMention&, const EntityMention&) = default;
};

struct ObjectRef {
  std::string feature;
  double score = 0.0;

  friend bool operator==(const ObjectRef&, const ObjectRef&) = default;
};

struct ManifestRecord {
  std::string id;
  EntityMention head;
  EntityMention tail;
  std::string text;
  std::string relation;
  std::string head_feature;
  std::string tail_feature;
  std::string image_feature;
  std::vector<ObjectRef> objects;

  friend bool operator==(const ManifestRecord&,
                         const ManifestRecord&) = default;
};

struct Manifest {
  std::filesystem::path base_dir;  // feature paths resolve against this
  std::vector<ManifestRecord> records;
};

std::string to_json_line(const ManifestRecord& record);
ManifestRecord parse_manifest_line(std::string_view line);

/// Reads and validates a manifest. Every referenced feature file must exist
/// with a well-formed header and payload size, and every relation must be in
/// `vocabulary`. Errors carry "<path>:<line>: ".
Manifest load_manifest(const std::filesystem::path& path,
                       const RelationVocabulary& vocabulary);

void write_manifest(const std::filesystem::path& path,
                    std::span<const ManifestRecord> records);

RelationVocabulary load_vocabulary(const std::filesystem::path& path);
void write_vocabulary(const std::filesystem::path& path,
                      const RelationVocabulary& vocabulary);

/// Default vocabulary location for a manifest: relations.txt beside it.
std::filesystem::path default_vocabulary_path(
    const std::filesystem::path& manifest);

/// Loads features, keeps the top-k objects and builds one hypergraph per
/// record. Dimension problems are reported with the instance id.
Dataset build_dataset(const Manifest& manifest, const ModelConfig& config);

/// Model architecture plus training settings from one flat key=value file.
struct ExperimentConfig {
  ModelConfig model;
  TrainConfig train;
};

/// Keys: lr batch_size weight_decay dropout epochs seed patience threads
/// lambda_c lambda_rec lambda_kl d layers heads eps_var text_dim visual_dim
/// k inter_modal, and grid.<key>=v1,v2,... Blank lines and '#' comments are
/// ignored. The relation vocabulary is not part of this file.
ExperimentConfig parse_experiment_config(std::string_view text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

void save_snapshot(const std::filesystem::path& path, const VmHanModel& model);
VmHanModel load_snapshot(const std::filesystem::path& path);

}  // namespace vmhan
