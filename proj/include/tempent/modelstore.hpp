// Copyright 2026 The tempent Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tempent/embedding.hpp"
#include "tempent/error.hpp"
#include "tempent/timeslice.hpp"
#include "tempent/vocabulary.hpp"

namespace tempent {

// Binary model layout, all integers little-endian:
//   "TEMB" | u32 version | u8 entity_aware | u32 dim | u64 vocab_size
//   vocab_size x { u32 token_len | token bytes | u64 count | u8 is_entity }
//   input matrix  (vocab_size x dim f32, row-major)
//   output matrix (vocab_size x dim f32, row-major)
//   u64 FNV-1a over every preceding byte
inline constexpr char kModelMagic[4] = {'T', 'E', 'M', 'B'};
inline constexpr std::uint32_t kModelVersion = 1;
inline constexpr std::string_view kModelExtension = ".temb";
inline constexpr std::string_view kAgnosticSuffix = ".agnostic";

static_assert(std::endian::native == std::endian::little,
              "model I/O assumes a little-endian host");

class Fnv1a64 {
 public:
  void update(const void *data, std::size_t n) {
    const auto *p = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= 1099511628211ULL;
    }
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 14695981039346656037ULL;
};

namespace detail {

class ModelWriter {
 public:
  explicit ModelWriter(const std::filesystem::path &path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    check();
  }

  template <typename T>
  void put(T value) {
    bytes(&value, sizeof(T));
  }

  void bytes(const void *data, std::size_t n) {
    hash_.update(data, n);
    out_.write(static_cast<const char *>(data),
               static_cast<std::streamsize>(n));
    check();
  }

  void finish() {
    const std::uint64_t sum = hash_.value();
    out_.write(reinterpret_cast<const char *>(&sum), sizeof(sum));
    out_.close();
    check();
  }

 private:
  void check() {
    if (!out_) throw Error(Errc::kWriteFailure, "cannot write " + path_.string());
  }
  std::filesystem::path path_;
  std::ofstream out_;
  Fnv1a64 hash_;
};

class ModelReader {
 public:
  explicit ModelReader(const std::filesystem::path &path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) {
      throw Error(Errc::kFileNotFound, "cannot open model " + path.string());
    }
    std::error_code ec;
    size_ = std::filesystem::file_size(path, ec);
    if (ec) throw Error(Errc::kFileNotFound, "cannot stat " + path.string());
  }

  std::uint64_t size() const { return size_; }
  std::uint64_t offset() const { return offset_; }
  std::uint64_t remaining() const { return size_ - offset_; }

  void bytes(void *data, std::size_t n) {
    need(n);
    in_.read(static_cast<char *>(data), static_cast<std::streamsize>(n));
    if (!in_) truncated();
    hash_.update(data, n);
    offset_ += n;
  }

  template <typename T>
  T get() {
    T value;
    bytes(&value, sizeof(T));
    return value;
  }

  void skip(std::uint64_t n) {
    need(n);
    in_.seekg(static_cast<std::streamoff>(n), std::ios::cur);
    offset_ += n;
  }

  void need(std::uint64_t n) const {
    if (n > remaining()) truncated();
  }

  [[noreturn]] void truncated() const {
    throw Error(Errc::kTruncatedFile,
                path_.string() + " is shorter than its header declares");
  }

  std::uint64_t hash() const { return hash_.value(); }
  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::uint64_t size_ = 0;
  std::uint64_t offset_ = 0;
  Fnv1a64 hash_;
};

struct Header {
  bool entity_aware;
  std::uint32_t dim;
  std::uint64_t vocab_size;
};

inline Header read_header(ModelReader &r) {
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kModelMagic, 4) != 0) {
    throw Error(Errc::kBadMagic, r.path().string() + " is not a TEMB file");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kModelVersion) {
    throw Error(Errc::kUnsupportedVersion,
                r.path().string() + " has version " + std::to_string(version));
  }
  Header h;
  h.entity_aware = r.get<std::uint8_t>() != 0;
  h.dim = r.get<std::uint32_t>();
  h.vocab_size = r.get<std::uint64_t>();
  // Every vocab record takes at least 13 bytes.
  if (h.dim == 0 || h.vocab_size > r.remaining() / 13) {
    r.truncated();
  }
  return h;
}

// Byte length of the two matrices plus checksum, validated against what is
// left in the file.
inline void check_payload_length(const ModelReader &r, const Header &h) {
  const std::uint64_t cells = h.vocab_size * h.dim;
  if (h.dim != 0 && cells / h.dim != h.vocab_size) r.truncated();
  const std::uint64_t want = 2 * cells * sizeof(float) + sizeof(std::uint64_t);
  if (r.remaining() < want) r.truncated();
  if (r.remaining() > want) {
    throw Error(Errc::kTruncatedFile,
                r.path().string() + " is longer than its header declares");
  }
}

// Derives the slice label and flavor from "<label>[.agnostic].temb".
inline std::pair<std::string, bool> split_model_filename(
    const std::filesystem::path &path) {
  std::string stem = path.stem().string();
  if (stem.size() > kAgnosticSuffix.size() &&
      stem.ends_with(kAgnosticSuffix)) {
    stem.resize(stem.size() - kAgnosticSuffix.size());
    return {stem, false};
  }
  return {stem, true};
}

}  // namespace detail

inline std::filesystem::path model_filename(std::string_view label,
                                            bool entity_aware) {
  std::string name(label);
  if (!entity_aware) name += kAgnosticSuffix;
  name += kModelExtension;
  return name;
}

inline void save_model(const EmbeddingModel &model,
                       const std::filesystem::path &path) {
  detail::ModelWriter w(path);
  w.bytes(kModelMagic, 4);
  w.put<std::uint32_t>(kModelVersion);
  w.put<std::uint8_t>(model.entity_aware ? 1 : 0);
  w.put<std::uint32_t>(model.dim);
  w.put<std::uint64_t>(model.vocab.size());
  for (const auto &e : model.vocab.entries()) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(e.token.size()));
    w.bytes(e.token.data(), e.token.size());
    w.put<std::uint64_t>(e.count);
    w.put<std::uint8_t>(e.is_entity ? 1 : 0);
  }
  w.bytes(model.input.data(), model.input.size() * sizeof(float));
  w.bytes(model.output.data(), model.output.size() * sizeof(float));
  w.finish();
}

// Loads and fully validates a model file. The slice label comes from the
// file name.
inline EmbeddingModel load_model(const std::filesystem::path &path) {
  detail::ModelReader r(path);
  const auto h = detail::read_header(r);
  std::vector<VocabEntry> entries;
  entries.reserve(h.vocab_size);
  std::uint64_t min_count = 0;
  for (std::uint64_t i = 0; i < h.vocab_size; ++i) {
    VocabEntry e;
    const auto len = r.get<std::uint32_t>();
    r.need(len);
    e.token.resize(len);
    r.bytes(e.token.data(), len);
    e.count = r.get<std::uint64_t>();
    e.is_entity = r.get<std::uint8_t>() != 0;
    min_count = i == 0 ? e.count : std::min(min_count, e.count);
    entries.push_back(std::move(e));
  }
  detail::check_payload_length(r, h);

  EmbeddingModel m;
  m.slice_label = detail::split_model_filename(path).first;
  m.entity_aware = h.entity_aware;
  m.dim = h.dim;
  m.vocab = Vocabulary::from_entries(std::move(entries),
                                     std::max<std::uint64_t>(min_count, 1));
  m.input.resize(h.vocab_size * h.dim);
  m.output.resize(h.vocab_size * h.dim);
  r.bytes(m.input.data(), m.input.size() * sizeof(float));
  r.bytes(m.output.data(), m.output.size() * sizeof(float));
  const std::uint64_t computed = r.hash();
  std::uint64_t stored = 0;
  r.bytes(&stored, sizeof(stored));
  if (stored != computed) {
    throw Error(Errc::kChecksumMismatch, path.string() + " payload checksum "
                                             "does not match its trailer");
  }
  return m;
}

struct ModelInfo {
  std::filesystem::path path;
  std::string label;
  bool entity_aware = true;
  std::uint32_t dim = 0;
  std::uint64_t vocab_size = 0;
  std::uint64_t checksum = 0;  // stored trailer, used as the model digest
};

// Reads header and vocabulary block and checks declared sizes against the
// file length without reading the matrices.
inline ModelInfo inspect_model(const std::filesystem::path &path) {
  detail::ModelReader r(path);
  const auto h = detail::read_header(r);
  for (std::uint64_t i = 0; i < h.vocab_size; ++i) {
    r.skip(r.get<std::uint32_t>());
    r.skip(sizeof(std::uint64_t) + 1);
  }
  detail::check_payload_length(r, h);
  r.skip(r.remaining() - sizeof(std::uint64_t));
  ModelInfo info;
  info.path = path;
  auto [label, aware] = detail::split_model_filename(path);
  info.label = label;
  info.entity_aware = h.entity_aware;
  info.dim = h.dim;
  info.vocab_size = h.vocab_size;
  info.checksum = r.get<std::uint64_t>();
  return info;
}

// Anything that can hand out the model of a slice.
class ModelSource {
 public:
  virtual ~ModelSource() = default;
  virtual const EmbeddingModel *find(std::string_view label) const = 0;
};

// Models held in memory, keyed by slice label.
class InMemoryModels : public ModelSource {
 public:
  void add(EmbeddingModel model) {
    std::string label = model.slice_label;
    models_.insert_or_assign(std::move(label), std::move(model));
  }
  const EmbeddingModel *find(std::string_view label) const override {
    auto it = models_.find(std::string(label));
    return it == models_.end() ? nullptr : &it->second;
  }
  std::size_t size() const { return models_.size(); }

 private:
  std::map<std::string, EmbeddingModel> models_;
};

// One model that answers for every slice (time-agnostic configuration).
class SingleModelSource : public ModelSource {
 public:
  explicit SingleModelSource(EmbeddingModel model) : model_(std::move(model)) {}
  const EmbeddingModel *find(std::string_view) const override {
    return &model_;
  }
  const EmbeddingModel &model() const { return model_; }

 private:
  EmbeddingModel model_;
};

// Model files under one directory, named "<label>.temb" (entity-aware) or
// "<label>.agnostic.temb". The directory listing is the registry; there is
// no index file. Models are loaded on first use.
class ModelRegistry {
 public:
  static ModelRegistry open(const std::filesystem::path &root,
                            std::ostream *warnings = nullptr) {
    if (!std::filesystem::is_directory(root)) {
      throw Error(Errc::kFileNotFound, "no model directory " + root.string());
    }
    ModelRegistry reg;
    reg.root_ = root;
    std::vector<std::filesystem::path> files;
    for (const auto &entry : std::filesystem::directory_iterator(root)) {
      if (entry.is_regular_file() &&
          entry.path().extension() == kModelExtension) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto &path : files) {
      auto [label, aware] = detail::split_model_filename(path);
      try {
        if (parse_slice_label(label).label != label) {
          throw Error(Errc::kInvalidLabel, "non-canonical label " + label);
        }
        ModelInfo info = inspect_model(path);
        if (info.entity_aware != aware) {
          throw Error(Errc::kInvalidArgument,
                      "entity_aware flag disagrees with file name");
        }
        reg.entries_.emplace(Key{label, aware}, std::move(info));
      } catch (const Error &e) {
        if (warnings) {
          *warnings << "warning: skipping " << path.string() << ": "
                    << e.what() << '\n';
        }
      }
    }
    return reg;
  }

  const std::filesystem::path &root() const { return root_; }
  std::size_t size() const { return entries_.size(); }

  std::vector<ModelInfo> entries() const {
    std::vector<ModelInfo> out;
    for (const auto &[key, info] : entries_) out.push_back(info);
    return out;
  }

  const ModelInfo *info(std::string_view label, bool entity_aware) const {
    auto it = entries_.find(Key{std::string(label), entity_aware});
    return it == entries_.end() ? nullptr : &it->second;
  }

  // Loads (once) and returns the model, or nullptr if none is registered.
  const EmbeddingModel *get(std::string_view label, bool entity_aware) const {
    Key key{std::string(label), entity_aware};
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    std::lock_guard<std::mutex> lock(*mutex_);
    auto &slot = cache_[key];
    if (!slot) slot = std::make_unique<EmbeddingModel>(load_model(it->second.path));
    return slot.get();
  }

  // A ModelSource over one flavor of models.
  class View : public ModelSource {
   public:
    View(const ModelRegistry &reg, bool entity_aware)
        : reg_(&reg), entity_aware_(entity_aware) {}
    const EmbeddingModel *find(std::string_view label) const override {
      return reg_->get(label, entity_aware_);
    }

   private:
    const ModelRegistry *reg_;
    bool entity_aware_;
  };

  View view(bool entity_aware) const { return View(*this, entity_aware); }

 private:
  ModelRegistry() = default;
  using Key = std::pair<std::string, bool>;

  std::filesystem::path root_;
  std::map<Key, ModelInfo> entries_;
  mutable std::map<Key, std::unique_ptr<EmbeddingModel>> cache_;
  std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
};

}  // namespace tempent
