// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vmhan/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "vmhan/error.hpp"
#include "vmhan/kernels.hpp"
#include "vmhan/rng.hpp"

namespace vmhan {

namespace fs = std::filesystem;

SynthMode parse_synth_mode(const std::string& name) {
  if (name == "cross") return SynthMode::Cross;
  if (name == "text") return SynthMode::Text;
  throw ValidationError("unknown synth mode '" + name + "' (cross|text)");
}

std::string to_string(SynthMode mode) {
  return mode == SynthMode::Cross ? "cross" : "text";
}

void SynthConfig::validate() const {
  if (relations < 2) throw ValidationError("synth needs at least 2 relations");
  if (n < 1) throw ValidationError("synth needs n >= 1");
  if (text_dim == 0 || visual_dim == 0 || latent_dim == 0) {
    throw ValidationError("synth dimensions must be positive");
  }
  if (mode == SynthMode::Cross && (k < 1 || latent_dim < 2)) {
    throw ValidationError("cross mode needs k >= 1 and latent_dim >= 2");
  }
  if (!(noise >= 0.0)) throw ValidationError("noise must be >= 0");
  if (!(scale > 0.0)) throw ValidationError("scale must be > 0");
}

namespace {

Tensor gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor t({rows, cols});
  for (double& v : t.values()) v = rng.normal();
  return t;
}

std::vector<double> embed(const Tensor& basis, std::span<const double> z,
                          double noise, double scale, Rng& rng) {
  std::vector<double> x(basis.rows());
  kernels::gemv(basis.values(), basis.rows(), basis.cols(), z, x);
  const double factor = scale / std::sqrt(static_cast<double>(x.size()));
  for (double& v : x) v = factor * (v + noise * rng.normal());
  return x;
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) -
                                  v.begin());
}

std::vector<double> text_scores(const SynthConfig& config,
                                const SynthHidden& hidden,
                                std::span<const double> head,
                                std::span<const double> tail) {
  std::vector<double> feature(head.begin(), head.end());
  feature.insert(feature.end(), tail.begin(), tail.end());
  std::vector<double> scores(config.relations);
  kernels::gemv(hidden.prototypes.values(), config.relations, feature.size(),
                feature, scores);
  return scores;
}

std::string feature_name(std::size_t index, const std::string& part) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "features/syn%06zu_%s.vmhf", index,
                part.c_str());
  return buf;
}

// Latents of one sample and the label they imply.
struct Draw {
  std::vector<double> head;
  std::vector<double> tail;
  std::vector<double> image;
  std::vector<std::vector<double>> objects;
  std::size_t label = 0;
};

// Head and tail take opposite entity types; every visual node shows the
// same object class.
Draw draw_cross(const SynthConfig& config, Rng& rng) {
  const std::size_t r = config.relations;
  const std::size_t q = config.latent_dim;
  const std::size_t type = rng.below(2);
  const std::size_t object_class = rng.below(r);

  Draw d;
  d.label = (object_class + type) % r;
  d.head.assign(q, 0.0);
  d.head[type] = 1.0;
  d.tail.assign(q, 0.0);
  d.tail[1 - type] = 1.0;
  d.image.assign(q + r, 0.0);
  d.image[q + object_class] = 1.0;
  d.objects.assign(config.k, d.image);
  return d;
}

// Returns false when the sample falls inside the rejection margin.
bool draw_text(const SynthConfig& config, const SynthHidden& hidden, Rng& rng,
               Draw& d) {
  const std::size_t q = config.latent_dim;
  d.head.resize(q);
  d.tail.resize(q);
  for (double& v : d.head) v = rng.normal();
  for (double& v : d.tail) v = rng.normal();
  d.image.assign(q + config.relations, 0.0);
  d.objects.assign(config.k, d.image);
  auto scores = text_scores(config, hidden, d.head, d.tail);
  d.label = argmax(scores);
  const double best = scores[d.label];
  scores[d.label] = -INFINITY;
  return best - *std::max_element(scores.begin(), scores.end()) >=
         config.min_margin;
}

}  // namespace

SynthHidden make_synth_hidden(const SynthConfig& config) {
  config.validate();
  Rng rng = Rng(config.seed).fork(0x4849444445ULL);
  const std::size_t q = config.latent_dim;
  SynthHidden h;
  h.text_basis = gaussian_matrix(config.text_dim, q, rng);
  h.visual_basis = gaussian_matrix(config.visual_dim, q + config.relations, rng);
  h.prototypes = gaussian_matrix(config.relations, 2 * q, rng);
  return h;
}

std::size_t synth_rule_label(const SynthConfig& config,
                             const SynthHidden& hidden,
                             std::span<const double> head,
                             std::span<const double> tail,
                             const std::vector<std::vector<double>>& objects) {
  if (config.mode == SynthMode::Text) {
    return argmax(text_scores(config, hidden, head, tail));
  }
  const std::size_t q = config.latent_dim;
  const std::size_t type = head[1] > head[0] ? 1 : 0;
  const std::size_t object_class =
      argmax(std::span<const double>(objects.at(0)).subspan(q));
  return (object_class + type) % config.relations;
}

std::vector<double> recover_latent(const Tensor& basis,
                                   std::span<const double> feature) {
  const std::size_t q = basis.cols();
  // Normal equations (B^T B) z = B^T x, solved by Gaussian elimination.
  std::vector<double> gram(q * q, 0.0);
  std::vector<double> rhs(q, 0.0);
  for (std::size_t r = 0; r < basis.rows(); ++r) {
    const auto row = basis.row(r);
    for (std::size_t a = 0; a < q; ++a) {
      rhs[a] += row[a] * feature[r];
      for (std::size_t b = 0; b < q; ++b) gram[a * q + b] += row[a] * row[b];
    }
  }
  for (std::size_t col = 0; col < q; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < q; ++r) {
      if (std::abs(gram[r * q + col]) > std::abs(gram[pivot * q + col])) pivot = r;
    }
    for (std::size_t c = 0; c < q; ++c) std::swap(gram[col * q + c], gram[pivot * q + c]);
    std::swap(rhs[col], rhs[pivot]);
    for (std::size_t r = col + 1; r < q; ++r) {
      const double f = gram[r * q + col] / gram[col * q + col];
      for (std::size_t c = col; c < q; ++c) gram[r * q + c] -= f * gram[col * q + c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> z(q);
  for (std::size_t r = q; r-- > 0;) {
    double s = rhs[r];
    for (std::size_t c = r + 1; c < q; ++c) s -= gram[r * q + c] * z[c];
    z[r] = s / gram[r * q + r];
  }
  return z;
}

SynthOutput generate_synth(const SynthConfig& config, const fs::path& out_dir) {
  config.validate();
  const SynthHidden hidden = make_synth_hidden(config);
  Rng rng = Rng(config.seed).fork(0x53414D504CULL);

  fs::create_directories(out_dir / "features");
  std::vector<std::string> labels;
  for (std::size_t r = 0; r < config.relations; ++r) {
    labels.push_back("rel" + std::to_string(r));
  }
  const RelationVocabulary vocab(labels);

  const std::size_t cap = (config.n + config.relations - 1) / config.relations;
  SynthOutput out;
  out.label_counts.assign(config.relations, 0);
  std::vector<ManifestRecord> records;
  records.reserve(config.n);

  while (records.size() < config.n) {
    Draw d;
    if (config.mode == SynthMode::Cross) {
      d = draw_cross(config, rng);
    } else if (!draw_text(config, hidden, rng, d)) {
      continue;
    }
    if (out.label_counts[d.label] >= cap) continue;
    const std::size_t label = d.label;

    const std::size_t index = records.size();
    ManifestRecord r;
    char id[32];
    std::snprintf(id, sizeof id, "syn%06zu", index);
    r.id = id;
    r.head = {"ent" + std::to_string(2 * index), {0, 0}};
    r.tail = {"ent" + std::to_string(2 * index + 1), {0, 0}};
    r.text = r.head.text + " and " + r.tail.text;
    r.head.span = {0, r.head.text.size()};
    r.tail.span = {r.head.text.size() + 5, r.text.size()};
    r.relation = vocab.label(label);

    auto emit = [&](const std::string& part, const Tensor& basis,
                    std::span<const double> z) {
      const std::string rel = feature_name(index, part);
      write_feature(out_dir / rel,
                    Tensor::vector(
                        embed(basis, z, config.noise, config.scale, rng)),
                    DType::F32);
      return rel;
    };
    r.head_feature = emit("head", hidden.text_basis, d.head);
    r.tail_feature = emit("tail", hidden.text_basis, d.tail);
    r.image_feature = emit("image", hidden.visual_basis, d.image);
    for (std::size_t o = 0; o < config.k; ++o) {
      r.objects.push_back({emit("obj" + std::to_string(o), hidden.visual_basis,
                                d.objects[o]),
                           rng.uniform(0.3, 1.0)});
    }
    ++out.label_counts[label];
    records.push_back(std::move(r));
  }

  out.manifest = out_dir / "manifest.jsonl";
  out.vocabulary = out_dir / "relations.txt";
  write_manifest(out.manifest, records);
  write_vocabulary(out.vocabulary, vocab);
  return out;
}

std::vector<fs::path> split_manifest(const fs::path& manifest,
                                     std::span<const std::size_t> sizes) {
  std::ifstream in(manifest);
  if (!in) throw ValidationError("cannot open '" + manifest.string() + "'");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  std::size_t need = 0;
  for (std::size_t s : sizes) need += s;
  if (need > lines.size()) {
    throw ValidationError("split sizes exceed the " +
                          std::to_string(lines.size()) + " manifest records");
  }
  std::vector<fs::path> parts;
  std::size_t at = 0;
  for (std::size_t p = 0; p < sizes.size(); ++p) {
    fs::path path = manifest.parent_path() /
                    (manifest.stem().string() + ".part" + std::to_string(p) +
                     ".jsonl");
    std::ofstream out(path, std::ios::trunc);
    for (std::size_t i = 0; i < sizes[p]; ++i) out << lines[at++] << '\n';
    parts.push_back(path);
  }
  return parts;
}

}  // namespace vmhan
