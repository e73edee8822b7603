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
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "tempent/error.hpp"
#include "tempent/timeslice.hpp"

namespace tempent {

// A linked entity mention. Offsets are byte offsets into the UTF-8 text,
// covering [start, end).
struct EntityMention {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string surface;
  std::string uri;

  std::size_t length() const { return end - start; }
  friend bool operator==(const EntityMention &, const EntityMention &) = default;
};

struct Document {
  std::string doc_id;
  Date timestamp;
  std::string text;
  std::vector<EntityMention> mentions;  // sorted by start, non-overlapping

  friend bool operator==(const Document &, const Document &) = default;
};

// Resolves overlapping mentions: the longest span wins, an earlier start
// wins among equal lengths, everything overlapping a winner is dropped.
// The result is sorted by start offset.
inline std::vector<EntityMention> normalize_mentions(
    std::vector<EntityMention> mentions) {
  std::vector<std::size_t> order(mentions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     const auto &ma = mentions[a];
                     const auto &mb = mentions[b];
                     if (ma.length() != mb.length()) {
                       return ma.length() > mb.length();
                     }
                     return ma.start < mb.start;
                   });
  std::vector<EntityMention> kept;
  for (std::size_t i : order) {
    const auto &m = mentions[i];
    bool overlaps = std::any_of(kept.begin(), kept.end(), [&](const auto &k) {
      return m.start < k.end && k.start < m.end;
    });
    if (!overlaps) kept.push_back(std::move(mentions[i]));
  }
  std::sort(kept.begin(), kept.end(),
            [](const auto &a, const auto &b) { return a.start < b.start; });
  return kept;
}

// Parses and validates one corpus line. `line_no` is 1-based and only used
// in diagnostics.
inline Document parse_document(const std::string &line, std::size_t line_no) {
  const std::string where = "line " + std::to_string(line_no) + ": ";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(Errc::kMalformedRecord, where + "invalid JSON (" +
                                            std::string(e.what()) + ")");
  }
  auto require = [&](const char *key, auto is_type, const char *type) {
    if (!j.is_object() || !j.contains(key) || !is_type(j[key])) {
      throw Error(Errc::kMalformedRecord, where + "field '" + key +
                                              "' missing or not " + type);
    }
  };
  auto is_string = [](const nlohmann::json &v) { return v.is_string(); };
  require("doc_id", is_string, "a string");
  require("timestamp", is_string, "a string");
  require("text", is_string, "a string");
  require(
      "mentions", [](const nlohmann::json &v) { return v.is_array(); },
      "an array");

  Document doc;
  doc.doc_id = j["doc_id"].get<std::string>();
  if (doc.doc_id.empty()) {
    throw Error(Errc::kMalformedRecord, where + "doc_id is empty");
  }
  auto ts = parse_date(j["timestamp"].get<std::string>());
  if (!ts) {
    throw Error(Errc::kInvalidTimestamp,
                where + "timestamp '" + j["timestamp"].get<std::string>() +
                    "' is not a valid YYYY-MM-DD date");
  }
  doc.timestamp = *ts;
  doc.text = j["text"].get<std::string>();

  std::vector<EntityMention> mentions;
  std::size_t index = 0;
  for (const auto &m : j["mentions"]) {
    const std::string mwhere =
        where + "mention " + std::to_string(index) + ": ";
    if (!m.is_object() || !m.contains("start") || !m.contains("end") ||
        !m.contains("surface") || !m.contains("uri") ||
        !m["start"].is_number_integer() || !m["end"].is_number_integer() ||
        !m["surface"].is_string() || !m["uri"].is_string()) {
      throw Error(Errc::kMalformedRecord,
                  mwhere + "needs integer start/end and string surface/uri");
    }
    const auto start = m["start"].get<std::int64_t>();
    const auto end = m["end"].get<std::int64_t>();
    if (start < 0 || start >= end ||
        static_cast<std::uint64_t>(end) > doc.text.size()) {
      throw Error(Errc::kOffsetMismatch,
                  mwhere + "span [" + std::to_string(start) + ", " +
                      std::to_string(end) + ") outside text of " +
                      std::to_string(doc.text.size()) + " bytes");
    }
    EntityMention em;
    em.start = static_cast<std::size_t>(start);
    em.end = static_cast<std::size_t>(end);
    em.surface = m["surface"].get<std::string>();
    em.uri = m["uri"].get<std::string>();
    if (doc.text.compare(em.start, em.length(), em.surface) != 0) {
      throw Error(Errc::kOffsetMismatch,
                  mwhere + "surface '" + em.surface + "' != span text '" +
                      doc.text.substr(em.start, em.length()) + "'");
    }
    if (em.uri.empty()) {
      throw Error(Errc::kMalformedRecord, mwhere + "uri is empty");
    }
    mentions.push_back(std::move(em));
    ++index;
  }
  doc.mentions = normalize_mentions(std::move(mentions));
  return doc;
}

inline nlohmann::ordered_json to_json(const Document &doc) {
  nlohmann::ordered_json j;
  j["doc_id"] = doc.doc_id;
  j["timestamp"] = format_date(doc.timestamp);
  j["text"] = doc.text;
  j["mentions"] = nlohmann::ordered_json::array();
  for (const auto &m : doc.mentions) {
    nlohmann::ordered_json jm;
    jm["start"] = m.start;
    jm["end"] = m.end;
    jm["surface"] = m.surface;
    jm["uri"] = m.uri;
    j["mentions"].push_back(std::move(jm));
  }
  return j;
}

inline std::string to_json_line(const Document &doc) {
  return to_json(doc).dump(-1, ' ', false,
                           nlohmann::json::error_handler_t::strict);
}

struct Diagnostic {
  std::size_t line;
  Errc code;
  std::string message;
};

enum class RejectPolicy { kThrow, kSkip };

// Streams documents from a JSON-lines corpus file in file order.
//
// With RejectPolicy::kThrow the first invalid record raises its Error. With
// kSkip invalid records are dropped, recorded in diagnostics(), and passed
// to the optional warning callback.
class CorpusReader {
 public:
  using WarningFn = std::function<void(const Diagnostic &)>;

  explicit CorpusReader(const std::filesystem::path &path,
                        RejectPolicy policy = RejectPolicy::kThrow,
                        std::optional<std::size_t> limit = std::nullopt,
                        WarningFn on_warning = nullptr)
      : in_(path, std::ios::binary),
        policy_(policy),
        limit_(limit),
        on_warning_(std::move(on_warning)) {
    if (!in_) {
      throw Error(Errc::kFileNotFound,
                  "cannot open corpus file " + path.string());
    }
  }

  std::optional<Document> next() {
    if (limit_ && yielded_ >= *limit_) return std::nullopt;
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      try {
        Document doc = parse_document(line, line_no_);
        if (!seen_ids_.insert(doc.doc_id).second) {
          throw Error(Errc::kMalformedRecord,
                      "line " + std::to_string(line_no_) +
                          ": duplicate doc_id '" + doc.doc_id + "'");
        }
        ++yielded_;
        return doc;
      } catch (const Error &e) {
        if (policy_ == RejectPolicy::kThrow) throw;
        diagnostics_.push_back({line_no_, e.code(), e.what()});
        if (on_warning_) on_warning_(diagnostics_.back());
      }
    }
    return std::nullopt;
  }

  const std::vector<Diagnostic> &diagnostics() const { return diagnostics_; }

 private:
  std::ifstream in_;
  RejectPolicy policy_;
  std::optional<std::size_t> limit_;
  WarningFn on_warning_;
  std::size_t line_no_ = 0;
  std::size_t yielded_ = 0;
  std::unordered_set<std::string> seen_ids_;
  std::vector<Diagnostic> diagnostics_;
};

inline std::vector<Document> load_corpus(
    const std::filesystem::path &path,
    std::optional<std::size_t> limit = std::nullopt) {
  CorpusReader reader(path, RejectPolicy::kThrow, limit);
  std::vector<Document> docs;
  while (auto doc = reader.next()) docs.push_back(std::move(*doc));
  return docs;
}

// Writes each document to `<out_dir>/<label>.jsonl` of its slice and returns
// the per-slice document counts. `next` yields documents until nullopt.
inline std::map<std::string, std::size_t> slice_corpus(
    const std::function<std::optional<Document>()> &next, Granularity g,
    const std::filesystem::path &out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw Error(Errc::kWriteFailure, "cannot create directory " +
                                         out_dir.string() + ": " +
                                         ec.message());
  }
  std::map<std::string, std::size_t> counts;
  std::map<std::string, std::unique_ptr<std::ofstream>> files;
  auto check = [](const std::ofstream &f, const std::filesystem::path &p) {
    if (!f) throw Error(Errc::kWriteFailure, "cannot write " + p.string());
  };
  while (auto doc = next()) {
    const std::string label = slice_of(doc->timestamp, g);
    auto path = out_dir / (label + ".jsonl");
    auto &file = files[label];
    if (!file) {
      file = std::make_unique<std::ofstream>(path, std::ios::binary |
                                                       std::ios::trunc);
      check(*file, path);
    }
    *file << to_json_line(*doc) << '\n';
    check(*file, path);
    ++counts[label];
  }
  for (auto &[label, file] : files) {
    file->close();
    check(*file, out_dir / (label + ".jsonl"));
  }
  return counts;
}

inline std::map<std::string, std::size_t> slice_corpus(
    CorpusReader &reader, Granularity g, const std::filesystem::path &out_dir) {
  return slice_corpus([&] { return reader.next(); }, g, out_dir);
}

inline std::map<std::string, std::size_t> slice_corpus(
    const std::vector<Document> &docs, Granularity g,
    const std::filesystem::path &out_dir) {
  std::size_t i = 0;
  return slice_corpus(
      [&]() -> std::optional<Document> {
        if (i == docs.size()) return std::nullopt;
        return docs[i++];
      },
      g, out_dir);
}

// Lists `<label>.jsonl` slice files in a directory, keyed by label. Files
// whose stem is not a canonical label are ignored.
inline std::map<std::string, std::filesystem::path> list_slice_files(
    const std::filesystem::path &dir) {
  std::map<std::string, std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) {
    throw Error(Errc::kFileNotFound, "no such directory " + dir.string());
  }
  for (const auto &entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".jsonl") {
      continue;
    }
    const std::string stem = entry.path().stem().string();
    try {
      if (parse_slice_label(stem).label == stem) out[stem] = entry.path();
    } catch (const Error &) {
    }
  }
  return out;
}

}  // namespace tempent
