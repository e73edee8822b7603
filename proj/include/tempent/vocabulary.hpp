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
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tempent/error.hpp"
#include "tempent/preprocess.hpp"

namespace tempent {

struct VocabEntry {
  std::string token;
  std::uint64_t count = 0;
  bool is_entity = false;

  friend bool operator==(const VocabEntry &, const VocabEntry &) = default;
};

// Token -> index map over tokens that passed the min-count threshold.
// Entries are ordered by descending count, then ascending token.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Takes entries as given (e.g. from a model file); rebuilds the index.
  static Vocabulary from_entries(std::vector<VocabEntry> entries,
                                 std::uint64_t min_count) {
    Vocabulary v;
    v.entries_ = std::move(entries);
    v.min_count_ = min_count;
    v.index_.reserve(v.entries_.size());
    for (std::size_t i = 0; i < v.entries_.size(); ++i) {
      v.total_count_ += v.entries_[i].count;
      if (!v.index_.emplace(v.entries_[i].token, static_cast<std::uint32_t>(i))
               .second) {
        throw Error(Errc::kInvalidArgument,
                    "duplicate vocabulary token '" + v.entries_[i].token + "'");
      }
    }
    return v;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<VocabEntry> &entries() const { return entries_; }
  const VocabEntry &operator[](std::size_t i) const { return entries_[i]; }
  std::uint64_t min_count() const { return min_count_; }

  // Sum of counts of retained tokens (training positions per epoch).
  std::uint64_t total_count() const { return total_count_; }

  std::optional<std::uint32_t> find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const Vocabulary &a, const Vocabulary &b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<VocabEntry> entries_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::uint64_t min_count_ = 1;
  std::uint64_t total_count_ = 0;
};

// Accumulates token counts. Counters built over separate shards can be
// merged; finalize() output does not depend on how the input was sharded.
class VocabCounter {
 public:
  void add(const TokenSequence &seq) {
    for (const auto &t : seq.tokens) ++counts_[t];
  }

  void merge(const VocabCounter &other) {
    for (const auto &[token, n] : other.counts_) counts_[token] += n;
  }

  Vocabulary finalize(std::uint64_t min_count) const {
    if (min_count < 1) {
      throw Error(Errc::kInvalidArgument, "min_count must be >= 1");
    }
    std::vector<VocabEntry> entries;
    for (const auto &[token, n] : counts_) {
      if (n >= min_count) entries.push_back({token, n, is_entity_token(token)});
    }
    if (entries.empty()) {
      throw Error(Errc::kEmptyVocabulary,
                  "no token occurs at least " + std::to_string(min_count) +
                      " times");
    }
    std::sort(entries.begin(), entries.end(), [](const auto &a, const auto &b) {
      if (a.count != b.count) return a.count > b.count;
      return a.token < b.token;
    });
    return Vocabulary::from_entries(std::move(entries), min_count);
  }

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
};

inline Vocabulary build_vocab(const std::vector<TokenSequence> &sequences,
                              std::uint64_t min_count) {
  VocabCounter counter;
  for (const auto &s : sequences) counter.add(s);
  return counter.finalize(min_count);
}

}  // namespace tempent
