// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vmhan/model.hpp"
#include "vmhan/objective.hpp"
#include "vmhan/param_store.hpp"

namespace vmhan {

struct AdamConfig {
  double lr = 1e-3;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamState() = default;
  explicit AdamState(const ParamStore& params);

  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::uint64_t step = 0;
};

/// Decoupled weight decay (θ ← θ(1 - lr·wd)) followed by the bias-corrected
/// Adam update from the gradients stored in `params`.
void adamw_step(ParamStore& params, AdamState& state, const AdamConfig& config);

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;  // micro, over positive (non-none) relations
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t count = 0;
};

Metrics compute_metrics(std::span<const std::size_t> gold,
                        std::span<const std::size_t> predicted,
                        std::size_t none_index);

struct Prediction {
  std::size_t label;
  double probability;
};

/// Argmax prediction per instance (lowest index wins ties).
std::vector<Prediction> predict_all(const VmHanModel& model,
                                    const Dataset& data, int threads = 1);

Metrics evaluate(const VmHanModel& model, const Dataset& data,
                 int threads = 1);

/// One hyperparameter of a grid: key is one of lr, weight_decay, dropout,
/// batch_size, lambda_c, lambda_rec, lambda_kl.
struct GridAxis {
  std::string key;
  std::vector<double> values;
};

struct TrainConfig {
  double lr = 1e-3;
  std::size_t batch_size = 16;
  double weight_decay = 0.01;
  double dropout = 0.6;
  std::size_t epochs = 60;
  std::uint64_t seed = 1;
  LossWeights weights;
  std::size_t patience = 10;
  int threads = 1;
  std::vector<GridAxis> grid;

  void validate() const;
  /// Applies one grid value; throws ValidationError for an unknown key.
  void set(const std::string& key, double value);
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  double loss_classification = 0.0;
  double loss_reconstruction = 0.0;
  double loss_kl = 0.0;
  bool has_validation = false;
  Metrics validation;
};

/// One JSON object, no trailing newline. Doubles are printed round-trip.
std::string to_json_line(const EpochRecord& record);

struct TrainResult {
  VmHanModel model;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;  // 0 when the initial parameters were kept
};

/// Mini-batch AdamW training. With a non-empty validation set the
/// parameters of the best validation-F1 epoch are returned and training
/// stops after `patience` epochs without improvement.
TrainResult train(const ModelConfig& model_config, const Dataset& train_set,
                  const Dataset& validation_set, const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

struct GridTrial {
  std::map<std::string, double> point;
  TrainConfig config;
  Metrics validation;
};

struct GridResult {
  TrainConfig best;
  std::size_t best_index = 0;
  std::vector<GridTrial> trials;
};

/// Trains one model per grid point (cartesian product, first axis
/// outermost) and keeps the best validation F1; ties go to the lower
/// learning rate, then to the earlier point.
GridResult grid_search(const ModelConfig& model_config,
                       const Dataset& train_set, const Dataset& validation_set,
                       const TrainConfig& config);

}  // namespace vmhan
