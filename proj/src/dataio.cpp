// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vmhan/dataio.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

#include "vmhan/error.hpp"

namespace vmhan {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr char kFeatureMagic[4] = {'V', 'M', 'H', 'F'};
constexpr char kSnapshotMagic[4] = {'V', 'M', 'H', 'S'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::string_view source)
      : bytes_(bytes), source_(source) {}

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw TruncatedError(std::string(source_) + ": truncated " + what +
                           " (need " + std::to_string(n) + " bytes, have " +
                           std::to_string(bytes_.size() - pos_) + ")");
    }
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint32_t u32(const char* what) {
    auto b = take(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }

  std::uint64_t u64(const char* what) {
    auto b = take(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::string_view source_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ValidationError("write failed for '" + path.string() + "'");
}

struct FeatureHeader {
  DType dtype;
  std::vector<std::size_t> extents;
  std::size_t header_bytes;
  std::size_t payload_bytes;
};

FeatureHeader parse_header(ByteReader& r, std::string_view source) {
  auto magic = r.take(4, "magic");
  if (std::memcmp(magic.data(), kFeatureMagic, 4) != 0) {
    throw BadMagicError(std::string(source) + ": bad magic (expected VMHF)");
  }
  const std::uint32_t version = r.u32("version");
  if (version != kFeatureVersion) {
    throw UnsupportedVersionError(std::string(source) +
                                  ": unsupported format version " +
                                  std::to_string(version));
  }
  const std::uint32_t code = r.u32("dtype");
  if (code != 1 && code != 2) {
    throw ParseError(std::string(source) + ": unknown dtype code " +
                     std::to_string(code));
  }
  const std::uint32_t rank = r.u32("rank");
  if (rank != 1 && rank != 2) {
    throw ParseError(std::string(source) + ": rank must be 1 or 2, got " +
                     std::to_string(rank));
  }
  FeatureHeader h{static_cast<DType>(code), {}, 16 + 4 * rank, 0};
  std::size_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const std::uint32_t e = r.u32("extents");
    if (e == 0) throw ParseError(std::string(source) + ": zero extent");
    h.extents.push_back(e);
    count *= e;
  }
  h.payload_bytes = count * (h.dtype == DType::F64 ? 8 : 4);
  return h;
}

}  // namespace

std::vector<std::uint8_t> encode_feature(const Tensor& tensor, DType dtype) {
  if (tensor.rank() != 1 && tensor.rank() != 2) {
    throw DimensionError("feature files hold rank 1 or 2 tensors, got " +
                         shape_string(tensor.shape()));
  }
  std::vector<std::uint8_t> out;
  const std::size_t width = dtype == DType::F64 ? 8 : 4;
  out.reserve(16 + 4 * tensor.rank() + width * tensor.size());
  out.insert(out.end(), kFeatureMagic, kFeatureMagic + 4);
  put_u32(out, kFeatureVersion);
  put_u32(out, static_cast<std::uint32_t>(dtype));
  put_u32(out, static_cast<std::uint32_t>(tensor.rank()));
  for (std::size_t e : tensor.shape()) put_u32(out, static_cast<std::uint32_t>(e));
  for (double v : tensor.values()) {
    if (dtype == DType::F64) {
      put_u64(out, std::bit_cast<std::uint64_t>(v));
    } else {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  return out;
}

Tensor decode_feature(std::span<const std::uint8_t> bytes,
                      std::string_view source) {
  ByteReader r(bytes, source);
  const FeatureHeader h = parse_header(r, source);
  const std::size_t count = h.payload_bytes / (h.dtype == DType::F64 ? 8 : 4);
  if (r.remaining() < h.payload_bytes) {
    throw TruncatedError(std::string(source) + ": truncated payload (" +
                         std::to_string(r.remaining()) + " of " +
                         std::to_string(h.payload_bytes) + " bytes)");
  }
  if (r.remaining() > h.payload_bytes) {
    throw ParseError(std::string(source) + ": trailing bytes after payload");
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = h.dtype == DType::F64
                    ? std::bit_cast<double>(r.u64("payload"))
                    : static_cast<double>(std::bit_cast<float>(r.u32("payload")));
  }
  return Tensor(h.extents, std::move(values));
}

void write_feature(const fs::path& path, const Tensor& tensor, DType dtype) {
  write_bytes(path, encode_feature(tensor, dtype));
}

Tensor read_feature(const fs::path& path) {
  return decode_feature(read_bytes(path), path.string());
}

std::vector<std::size_t> probe_feature(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("missing feature file '" + path.string() + "'");
  std::vector<std::uint8_t> head(24);
  in.read(reinterpret_cast<char*>(head.data()), 24);
  head.resize(static_cast<std::size_t>(in.gcount()));
  ByteReader r(head, path.string());
  const FeatureHeader h = parse_header(r, path.string());
  const auto size = fs::file_size(path);
  if (size < h.header_bytes + h.payload_bytes) {
    throw TruncatedError(path.string() + ": truncated payload");
  }
  if (size > h.header_bytes + h.payload_bytes) {
    throw ParseError(path.string() + ": trailing bytes after payload");
  }
  return h.extents;
}

std::string to_json_line(const ManifestRecord& r) {
  nlohmann::ordered_json j;
  auto mention = [](const EntityMention& m) {
    nlohmann::ordered_json e;
    e["text"] = m.text;
    e["span"] = {m.span.first, m.span.second};
    return e;
  };
  j["id"] = r.id;
  j["head"] = mention(r.head);
  j["tail"] = mention(r.tail);
  j["text"] = r.text;
  j["relation"] = r.relation;
  j["head_feature"] = r.head_feature;
  j["tail_feature"] = r.tail_feature;
  j["image_feature"] = r.image_feature;
  j["objects"] = nlohmann::ordered_json::array();
  for (const auto& o : r.objects) {
    j["objects"].push_back({{"feature", o.feature}, {"score", o.score}});
  }
  return j.dump();
}

ManifestRecord parse_manifest_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed record: ") + e.what());
  }
  try {
    auto mention = [](const json& e) {
      EntityMention m;
      m.text = e.at("text").get<std::string>();
      const auto& span = e.at("span");
      if (!span.is_array() || span.size() != 2) {
        throw ValidationError("span must be [begin, end]");
      }
      m.span = {span[0].get<std::size_t>(), span[1].get<std::size_t>()};
      if (m.span.first > m.span.second) {
        throw ValidationError("span begin after end");
      }
      return m;
    };
    ManifestRecord r;
    r.id = j.at("id").get<std::string>();
    r.head = mention(j.at("head"));
    r.tail = mention(j.at("tail"));
    r.text = j.value("text", "");
    r.relation = j.at("relation").get<std::string>();
    r.head_feature = j.at("head_feature").get<std::string>();
    r.tail_feature = j.at("tail_feature").get<std::string>();
    r.image_feature = j.at("image_feature").get<std::string>();
    for (const auto& o : j.value("objects", json::array())) {
      r.objects.push_back(
          {o.at("feature").get<std::string>(), o.value("score", 0.0)});
    }
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed record: ") + e.what());
  }
}

Manifest load_manifest(const fs::path& path,
                       const RelationVocabulary& vocabulary) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open manifest '" + path.string() + "'");
  Manifest m;
  m.base_dir = path.parent_path();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      ManifestRecord r = parse_manifest_line(line);
      vocabulary.index_of(r.relation);
      probe_feature(m.base_dir / r.head_feature);
      probe_feature(m.base_dir / r.tail_feature);
      probe_feature(m.base_dir / r.image_feature);
      for (const auto& o : r.objects) probe_feature(m.base_dir / o.feature);
      m.records.push_back(std::move(r));
    } catch (const Error& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": " + e.what());
    }
  }
  return m;
}

void write_manifest(const fs::path& path,
                    std::span<const ManifestRecord> records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

RelationVocabulary load_vocabulary(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open vocabulary '" + path.string() + "'");
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (!line.empty()) labels.push_back(line);
  }
  return RelationVocabulary(std::move(labels));
}

void write_vocabulary(const fs::path& path,
                      const RelationVocabulary& vocabulary) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  for (const auto& l : vocabulary.labels()) out << l << '\n';
}

fs::path default_vocabulary_path(const fs::path& manifest) {
  return manifest.parent_path() / "relations.txt";
}

Dataset build_dataset(const Manifest& manifest, const ModelConfig& config) {
  Dataset out;
  out.reserve(manifest.records.size());
  auto load = [&](const std::string& rel) {
    Tensor t = read_feature(manifest.base_dir / rel);
    return std::make_shared<const std::vector<double>>(t.data());
  };
  for (const auto& r : manifest.records) {
    try {
      Feature head = load(r.head_feature);
      Feature tail = load(r.tail_feature);
      Feature image = load(r.image_feature);
      std::vector<ObjectCandidate> candidates;
      for (const auto& o : r.objects) candidates.push_back({load(o.feature), o.score});
      const auto chosen =
          select_objects(*head, *tail, candidates, config.max_objects);
      std::vector<Feature> objects;
      for (std::size_t c : chosen) objects.push_back(candidates[c].feature);

      auto check = [&](const Feature& f, std::size_t want, const char* what) {
        if (f->size() != want) {
          throw DimensionError(std::string(what) + " feature has " +
                               std::to_string(f->size()) + " values, model expects " +
                               std::to_string(want));
        }
      };
      check(head, config.encoder.text_dim, "head");
      check(tail, config.encoder.text_dim, "tail");
      check(image, config.encoder.visual_dim, "image");
      for (const auto& o : objects) check(o, config.encoder.visual_dim, "object");

      out.push_back({r.id,
                     build_hypergraph(std::move(head), std::move(tail),
                                      std::move(image), std::move(objects),
                                      config.graph_options()),
                     config.relations.index_of(r.relation)});
    } catch (const Error& e) {
      throw ValidationError("instance '" + r.id + "': " + e.what());
    }
  }
  return out;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "': not a number: '" + value +
                          "'");
  }
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw ValidationError("config key '" + key +
                          "': expected a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ValidationError("config key '" + key + "': expected true/false");
}

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string snapshot_config_text(const ModelConfig& c) {
  std::ostringstream out;
  out << "d=" << c.encoder.d << '\n'
      << "layers=" << c.encoder.layers << '\n'
      << "heads=" << c.encoder.heads << '\n'
      << "dropout=" << format_double(c.encoder.dropout) << '\n'
      << "eps_var=" << format_double(c.encoder.eps_var) << '\n'
      << "text_dim=" << c.encoder.text_dim << '\n'
      << "visual_dim=" << c.encoder.visual_dim << '\n'
      << "k=" << c.max_objects << '\n'
      << "inter_modal=" << (c.inter_modal ? "true" : "false") << '\n';
  for (const auto& l : c.relations.labels()) out << "relation=" << l << '\n';
  return out.str();
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text) {
  ExperimentConfig cfg;
  cfg.model.relations = RelationVocabulary({"relation"});
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": expected key=value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    auto& t = cfg.train;
    auto& e = cfg.model.encoder;
    if (key.starts_with("grid.")) {
      GridAxis axis{key.substr(5), {}};
      TrainConfig probe;
      probe.set(axis.key, 1.0);  // rejects unknown keys
      std::istringstream parts(value);
      std::string part;
      while (std::getline(parts, part, ',')) {
        axis.values.push_back(parse_double(key, trim(part)));
      }
      t.grid.push_back(std::move(axis));
    } else if (key == "lr") {
      t.lr = parse_double(key, value);
    } else if (key == "batch_size") {
      t.batch_size = parse_count(key, value);
    } else if (key == "weight_decay") {
      t.weight_decay = parse_double(key, value);
    } else if (key == "dropout") {
      t.dropout = parse_double(key, value);
      e.dropout = t.dropout;
    } else if (key == "epochs") {
      t.epochs = parse_count(key, value);
    } else if (key == "seed") {
      t.seed = parse_count(key, value);
    } else if (key == "patience") {
      t.patience = parse_count(key, value);
    } else if (key == "threads") {
      t.threads = static_cast<int>(parse_count(key, value));
    } else if (key == "lambda_c") {
      t.weights.classification = parse_double(key, value);
    } else if (key == "lambda_rec") {
      t.weights.reconstruction = parse_double(key, value);
    } else if (key == "lambda_kl") {
      t.weights.kl = parse_double(key, value);
    } else if (key == "d") {
      e.d = parse_count(key, value);
    } else if (key == "layers") {
      e.layers = parse_count(key, value);
    } else if (key == "heads") {
      e.heads = parse_count(key, value);
    } else if (key == "eps_var") {
      e.eps_var = parse_double(key, value);
    } else if (key == "text_dim") {
      e.text_dim = parse_count(key, value);
    } else if (key == "visual_dim") {
      e.visual_dim = parse_count(key, value);
    } else if (key == "k") {
      cfg.model.max_objects = parse_count(key, value);
    } else if (key == "inter_modal") {
      cfg.model.inter_modal = parse_bool(key, value);
    } else {
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": unknown key '" + key + "'");
    }
  }
  cfg.model.encoder.validate();
  cfg.train.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_experiment_config(text.str());
}

void save_snapshot(const fs::path& path, const VmHanModel& model) {
  std::vector<std::uint8_t> out(kSnapshotMagic, kSnapshotMagic + 4);
  put_u32(out, kSnapshotVersion);
  const std::string config = snapshot_config_text(model.config());
  put_u32(out, static_cast<std::uint32_t>(config.size()));
  out.insert(out.end(), config.begin(), config.end());
  put_u32(out, static_cast<std::uint32_t>(model.params().size()));
  for (const auto& p : model.params().params()) {
    put_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out.insert(out.end(), p.name.begin(), p.name.end());
    const auto block = encode_feature(p.value, DType::F64);
    put_u64(out, block.size());
    out.insert(out.end(), block.begin(), block.end());
  }
  write_bytes(path, out);
}

VmHanModel load_snapshot(const fs::path& path) {
  const auto bytes = read_bytes(path);
  const std::string source = path.string();
  ByteReader r(bytes, source);
  auto magic = r.take(4, "magic");
  if (std::memcmp(magic.data(), kSnapshotMagic, 4) != 0) {
    throw BadMagicError(source + ": bad magic (expected VMHS)");
  }
  const std::uint32_t version = r.u32("version");
  if (version != kSnapshotVersion) {
    throw UnsupportedVersionError(source + ": unsupported snapshot version " +
                                  std::to_string(version));
  }
  const auto config_bytes = r.take(r.u32("config length"), "config");
  const std::string config_text(config_bytes.begin(), config_bytes.end());

  ModelConfig mc;
  std::vector<std::string> relations;
  std::istringstream in(config_text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "relation") {
      relations.push_back(value);
    } else if (key == "d") {
      mc.encoder.d = parse_count(key, value);
    } else if (key == "layers") {
      mc.encoder.layers = parse_count(key, value);
    } else if (key == "heads") {
      mc.encoder.heads = parse_count(key, value);
    } else if (key == "dropout") {
      mc.encoder.dropout = parse_double(key, value);
    } else if (key == "eps_var") {
      mc.encoder.eps_var = parse_double(key, value);
    } else if (key == "text_dim") {
      mc.encoder.text_dim = parse_count(key, value);
    } else if (key == "visual_dim") {
      mc.encoder.visual_dim = parse_count(key, value);
    } else if (key == "k") {
      mc.max_objects = parse_count(key, value);
    } else if (key == "inter_modal") {
      mc.inter_modal = parse_bool(key, value);
    } else {
      throw ParseError(source + ": unknown snapshot config key '" + key + "'");
    }
  }
  mc.relations = RelationVocabulary(std::move(relations));

  ParamStore store;
  const std::uint32_t count = r.u32("parameter count");
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_bytes = r.take(r.u32("name length"), "parameter name");
    std::string name(name_bytes.begin(), name_bytes.end());
    const std::uint64_t block_len = r.u64("block length");
    const auto block = r.take(static_cast<std::size_t>(block_len), "parameter block");
    store.add(name, decode_feature(block, source + ":" + name));
  }
  if (r.remaining() != 0) throw ParseError(source + ": trailing bytes");
  return VmHanModel(std::move(mc), std::move(store));
}

}  // namespace vmhan
