// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vmhan/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

#include "vmhan/error.hpp"
#include "vmhan/parallel.hpp"

namespace vmhan {

AdamState::AdamState(const ParamStore& params) {
  for (const auto& p : params.params()) {
    first_moment.emplace_back(p.value.shape());
    second_moment.emplace_back(p.value.shape());
  }
}

void adamw_step(ParamStore& params, AdamState& state,
                const AdamConfig& config) {
  if (state.first_moment.size() != params.size()) state = AdamState(params);
  for (const auto& p : params.params()) {
    for (double g : p.grad.values()) {
      if (!std::isfinite(g)) {
        throw NumericInstabilityError("non-finite gradient for parameter '" +
                                      p.name + "'");
      }
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(config.beta1, t);
  const double bc2 = 1.0 - std::pow(config.beta2, t);
  const double decay = 1.0 - config.lr * config.weight_decay;

  for (std::size_t s = 0; s < params.size(); ++s) {
    auto theta = params[s].value.values();
    const auto grad = params[s].grad.values();
    auto m = state.first_moment[s].values();
    auto v = state.second_moment[s].values();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      theta[i] *= decay;
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grad[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      theta[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
    }
  }
}

Metrics compute_metrics(std::span<const std::size_t> gold,
                        std::span<const std::size_t> predicted,
                        std::size_t none_index) {
  if (gold.size() != predicted.size()) {
    throw DimensionError("compute_metrics: label list lengths differ");
  }
  std::size_t correct = 0;
  std::size_t true_pos = 0;
  std::size_t gold_pos = 0;
  std::size_t pred_pos = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == predicted[i]) ++correct;
    if (gold[i] != none_index) ++gold_pos;
    if (predicted[i] != none_index) ++pred_pos;
    if (gold[i] == predicted[i] && gold[i] != none_index) ++true_pos;
  }
  auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  Metrics m;
  m.count = gold.size();
  m.accuracy = ratio(correct, gold.size());
  m.precision = ratio(true_pos, pred_pos);
  m.recall = ratio(true_pos, gold_pos);
  const double pr = m.precision + m.recall;
  m.f1 = pr == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / pr;
  return m;
}

std::vector<Prediction> predict_all(const VmHanModel& model,
                                    const Dataset& data, int threads) {
  std::vector<Prediction> out(data.size());
  parallel_for(data.size(), threads, [&](std::size_t i) {
    const auto probs = model.predict(data[i].graph);
    const auto best = std::max_element(probs.begin(), probs.end());
    out[i] = {static_cast<std::size_t>(best - probs.begin()), *best};
  });
  return out;
}

Metrics evaluate(const VmHanModel& model, const Dataset& data, int threads) {
  if (data.empty()) throw ValidationError("evaluate: empty dataset");
  const auto preds = predict_all(model, data, threads);
  std::vector<std::size_t> gold(data.size());
  std::vector<std::size_t> predicted(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    gold[i] = data[i].label;
    predicted[i] = preds[i].label;
  }
  return compute_metrics(gold, predicted,
                         model.config().relations.none_index());
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ValidationError("lr must be > 0");
  if (batch_size == 0) throw ValidationError("batch_size must be >= 1");
  if (!(weight_decay >= 0.0)) {
    throw ValidationError("weight_decay must be >= 0");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ValidationError("dropout must lie in [0, 1)");
  }
  weights.validate();
  for (const auto& axis : grid) {
    if (axis.values.empty()) {
      throw ValidationError("grid axis '" + axis.key + "' has no values");
    }
  }
}

void TrainConfig::set(const std::string& key, double value) {
  if (key == "lr") {
    lr = value;
  } else if (key == "weight_decay") {
    weight_decay = value;
  } else if (key == "dropout") {
    dropout = value;
  } else if (key == "batch_size") {
    batch_size = static_cast<std::size_t>(value);
  } else if (key == "lambda_c") {
    weights.classification = value;
  } else if (key == "lambda_rec") {
    weights.reconstruction = value;
  } else if (key == "lambda_kl") {
    weights.kl = value;
  } else {
    throw ValidationError("unknown grid key '" + key + "'");
  }
}

std::string to_json_line(const EpochRecord& r) {
  nlohmann::ordered_json j;
  j["epoch"] = r.epoch;
  j["loss"] = r.loss;
  j["loss_c"] = r.loss_classification;
  j["loss_rec"] = r.loss_reconstruction;
  j["loss_kl"] = r.loss_kl;
  if (r.has_validation) {
    j["val_accuracy"] = r.validation.accuracy;
    j["val_precision"] = r.validation.precision;
    j["val_recall"] = r.validation.recall;
    j["val_f1"] = r.validation.f1;
  }
  return j.dump();
}

namespace {

std::uint64_t instance_stream(std::size_t epoch, std::size_t position) {
  return (static_cast<std::uint64_t>(epoch) << 32) ^
         static_cast<std::uint64_t>(position);
}

}  // namespace

TrainResult train(const ModelConfig& model_config, const Dataset& train_set,
                  const Dataset& validation_set, const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  config.validate();
  ModelConfig mc = model_config;
  mc.encoder.dropout = config.dropout;
  TrainResult result{VmHanModel(mc, config.seed), {}, 0};
  if (config.epochs == 0) return result;
  if (train_set.empty()) throw ValidationError("train: empty dataset");

  VmHanModel& model = result.model;
  ParamStore& params = model.params();
  AdamState adam(params);
  const AdamConfig adam_config{config.lr, config.weight_decay};
  Rng rng(config.seed ^ 0xD1B54A32D192ED03ULL);

  const std::size_t batch = config.batch_size;
  std::vector<GradientBuffer> buffers(std::min(batch, train_set.size()),
                                      GradientBuffer(params));
  std::vector<LossBreakdown> losses(buffers.size());
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  ParamStore best = params;
  double best_f1 = -1.0;
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    EpochRecord record;
    record.epoch = epoch;

    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t count = std::min(batch, order.size() - start);
      const double scale = 1.0 / static_cast<double>(count);
      parallel_for(count, config.threads, [&](std::size_t b) {
        const std::size_t position = start + b;
        const Instance& inst = train_set[order[position]];
        Rng dropout_rng = rng.fork(instance_stream(epoch, position));
        buffers[b].zero();
        try {
          losses[b] = model.loss_and_gradient(inst.graph, inst.label,
                                              config.weights, Mode::Train,
                                              &dropout_rng, buffers[b], scale);
        } catch (const Error& e) {
          throw ValidationError("instance '" + inst.id + "': " + e.what());
        }
      });
      params.zero_grads();
      for (std::size_t b = 0; b < count; ++b) {
        buffers[b].add_to(params);
        record.loss += losses[b].total;
        record.loss_classification += losses[b].classification;
        record.loss_reconstruction += losses[b].reconstruction;
        record.loss_kl += losses[b].kl;
      }
      adamw_step(params, adam, adam_config);
    }

    const double n = static_cast<double>(train_set.size());
    record.loss /= n;
    record.loss_classification /= n;
    record.loss_reconstruction /= n;
    record.loss_kl /= n;

    bool stop = false;
    if (!validation_set.empty()) {
      record.has_validation = true;
      record.validation = evaluate(model, validation_set, config.threads);
      if (record.validation.f1 > best_f1) {
        best_f1 = record.validation.f1;
        best = params;
        result.best_epoch = epoch;
        stale = 0;
      } else if (++stale >= config.patience) {
        stop = true;
      }
    }
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);
    if (stop) break;
  }

  if (validation_set.empty()) {
    result.best_epoch = result.history.size();
  } else {
    for (std::size_t s = 0; s < params.size(); ++s) {
      params[s].value = best[s].value;
    }
  }
  params.zero_grads();
  return result;
}

GridResult grid_search(const ModelConfig& model_config,
                       const Dataset& train_set, const Dataset& validation_set,
                       const TrainConfig& config) {
  config.validate();
  if (config.grid.empty()) throw ValidationError("grid_search: empty grid");

  std::size_t total = 1;
  for (const auto& axis : config.grid) total *= axis.values.size();

  GridResult result;
  for (std::size_t flat = 0; flat < total; ++flat) {
    GridTrial trial;
    trial.config = config;
    trial.config.grid.clear();
    std::size_t rest = flat;
    for (std::size_t a = config.grid.size(); a-- > 0;) {
      const auto& axis = config.grid[a];
      const double v = axis.values[rest % axis.values.size()];
      rest /= axis.values.size();
      trial.config.set(axis.key, v);
      trial.point[axis.key] = v;
    }
    TrainResult trained =
        train(model_config, train_set, validation_set, trial.config);
    trial.validation = validation_set.empty()
                           ? Metrics{}
                           : evaluate(trained.model, validation_set,
                                      config.threads);
    result.trials.push_back(std::move(trial));
  }

  for (std::size_t i = 1; i < result.trials.size(); ++i) {
    const auto& cand = result.trials[i];
    const auto& best = result.trials[result.best_index];
    if (cand.validation.f1 > best.validation.f1 ||
        (cand.validation.f1 == best.validation.f1 &&
         cand.config.lr < best.config.lr)) {
      result.best_index = i;
    }
  }
  result.best = result.trials[result.best_index].config;
  return result;
}

}  // namespace vmhan
