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
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "tempent/embedding.hpp"
#include "tempent/error.hpp"
#include "tempent/modelstore.hpp"
#include "tempent/preprocess.hpp"
#include "tempent/timeslice.hpp"

namespace tempent {

using Vector = std::vector<float>;

// Weights of the query slice, the slice before it, and the slice after it.
struct SliceWeights {
  double current = 1.0;
  double previous = 0.0;
  double next = 0.0;

  bool valid() const {
    return current >= 0 && previous >= 0 && next >= 0 &&
           std::abs(current + previous + next - 1.0) <= 1e-9;
  }
};

struct RelatednessQuery {
  std::string qid;
  std::vector<std::string> entities;
  std::string slice;
  std::vector<std::string> candidates;
  std::size_t k = 10;
  SliceWeights weights;

  // Validates the query and removes query entities (and duplicates) from
  // the candidate list.
  static RelatednessQuery make(std::string qid,
                               std::vector<std::string> entities,
                               std::string slice,
                               std::vector<std::string> candidates,
                               std::size_t k, SliceWeights weights = {}) {
    if (entities.empty()) {
      throw Error(Errc::kInvalidArgument, "query needs at least one entity");
    }
    for (const auto &e : entities) {
      if (e.empty()) throw Error(Errc::kEmptyUri, "empty query entity URI");
    }
    if (k < 1) throw Error(Errc::kInvalidArgument, "k must be >= 1");
    if (!weights.valid()) {
      throw Error(Errc::kInvalidArgument,
                  "weights must be non-negative and sum to 1");
    }
    parse_slice_label(slice);
    std::unordered_set<std::string> seen(entities.begin(), entities.end());
    std::vector<std::string> kept;
    for (auto &c : candidates) {
      if (c.empty()) throw Error(Errc::kEmptyUri, "empty candidate URI");
      if (seen.insert(c).second) kept.push_back(std::move(c));
    }
    return {std::move(qid), std::move(entities), std::move(slice),
            std::move(kept), k, weights};
  }
};

struct ScoredEntity {
  std::string uri;
  std::optional<double> score;

  friend bool operator==(const ScoredEntity &, const ScoredEntity &) = default;
};

// Score written to run files for candidates that could not be scored. It
// sorts below every cosine.
inline constexpr double kMissingScore = -2.0;

// Entity-ID row if present, otherwise the mean of the in-vocabulary label
// words, otherwise nothing.
inline std::optional<Vector> resolve_entity_vector(const EmbeddingModel &model,
                                                   std::string_view uri) {
  if (uri.empty()) return std::nullopt;
  if (auto row = wordvec(model, entity_token(uri))) {
    return Vector(row->begin(), row->end());
  }
  std::vector<std::string> words;
  try {
    words = entity_label(uri);
  } catch (const Error &) {
    return std::nullopt;
  }
  std::vector<double> sum(model.dim, 0.0);
  std::size_t found = 0;
  for (const auto &w : words) {
    auto row = wordvec(model, w);
    if (!row) continue;
    for (std::size_t d = 0; d < model.dim; ++d) sum[d] += (*row)[d];
    ++found;
  }
  if (found == 0) return std::nullopt;
  Vector out(model.dim);
  for (std::size_t d = 0; d < model.dim; ++d) {
    out[d] = static_cast<float>(sum[d] / static_cast<double>(found));
  }
  return out;
}

// Mean of the vectors of the query entities that resolve.
inline std::optional<Vector> query_vector(
    const EmbeddingModel &model, std::span<const std::string> entities) {
  std::vector<double> sum(model.dim, 0.0);
  std::size_t found = 0;
  for (const auto &e : entities) {
    auto v = resolve_entity_vector(model, e);
    if (!v) continue;
    for (std::size_t d = 0; d < model.dim; ++d) sum[d] += (*v)[d];
    ++found;
  }
  if (found == 0) return std::nullopt;
  Vector out(model.dim);
  for (std::size_t d = 0; d < model.dim; ++d) {
    out[d] = static_cast<float>(sum[d] / static_cast<double>(found));
  }
  return out;
}

// Cosine similarity; nothing if either vector has zero norm.
inline std::optional<double> cosine(std::span<const float> a,
                                    std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(Errc::kDimensionMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0 || nb == 0) return std::nullopt;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

namespace detail {

[[noreturn]] inline void missing_model(std::string_view slice) {
  throw Error(Errc::kMissingModel,
              "no model for slice '" + std::string(slice) + "'");
}

// Scores candidates against one query inside one model; the query vector
// is resolved once.
class SliceScorer {
 public:
  SliceScorer(const EmbeddingModel *model,
              std::span<const std::string> entities)
      : model_(model) {
    if (model_) query_ = query_vector(*model_, entities);
  }

  bool has_query() const { return query_.has_value(); }

  std::optional<double> score(std::string_view candidate) const {
    if (!model_ || !query_) return std::nullopt;
    auto c = resolve_entity_vector(*model_, candidate);
    if (!c) return std::nullopt;
    return cosine(*query_, *c);
  }

 private:
  const EmbeddingModel *model_;
  std::optional<Vector> query_;
};

// Scorers for the current, previous and next slice, in that order. Slots
// with zero weight or without a model stay empty.
class RelaxedScorer {
 public:
  RelaxedScorer(std::span<const std::string> entities, std::string_view slice,
                const SliceWeights &w, const ModelSource &models)
      : weights_{w.current, w.previous, w.next} {
    const EmbeddingModel *central = models.find(slice);
    if (!central) missing_model(slice);
    std::array<const EmbeddingModel *, 3> found{central, nullptr, nullptr};
    if (w.previous > 0 || w.next > 0) {
      auto [prev, next] = neighbor_slices(slice);
      if (w.previous > 0) found[1] = models.find(prev);
      if (w.next > 0) found[2] = models.find(next);
    }
    for (std::size_t i = 0; i < 3; ++i) {
      if (weights_[i] > 0 && found[i]) scorers_[i].emplace(found[i], entities);
    }
  }

  bool has_query() const {
    return std::any_of(scorers_.begin(), scorers_.end(),
                       [](const auto &s) { return s && s->has_query(); });
  }

  // Weighted mean over the terms that exist; weights of missing terms are
  // dropped and the rest renormalized.
  std::optional<double> score(std::string_view candidate) const {
    std::optional<double> num;
    double den = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      if (!scorers_[i]) continue;
      auto s = scorers_[i]->score(candidate);
      if (!s) continue;
      num = num ? *num + weights_[i] * *s : weights_[i] * *s;
      den += weights_[i];
    }
    if (!num) return std::nullopt;
    return *num / den;
  }

 private:
  std::array<double, 3> weights_;
  std::array<std::optional<SliceScorer>, 3> scorers_;
};

}  // namespace detail

// Cosine between the query-entity vector and the candidate's vector in the
// model of `slice`.
inline std::optional<double> sim(std::span<const std::string> query_entities,
                                 std::string_view candidate,
                                 std::string_view slice,
                                 const ModelSource &models) {
  const EmbeddingModel *model = models.find(slice);
  if (!model) detail::missing_model(slice);
  return detail::SliceScorer(model, query_entities).score(candidate);
}

// Blend of sim over the slice and its two neighbors.
inline std::optional<double> sim_relaxed(
    std::span<const std::string> query_entities, std::string_view candidate,
    std::string_view slice, const SliceWeights &weights,
    const ModelSource &models) {
  if (!weights.valid()) {
    throw Error(Errc::kInvalidArgument,
                "weights must be non-negative and sum to 1");
  }
  return detail::RelaxedScorer(query_entities, slice, weights, models)
      .score(candidate);
}

// Sorts by descending score, unscored last, ties by ascending URI.
inline void sort_ranking(std::vector<ScoredEntity> &ranked) {
  std::sort(ranked.begin(), ranked.end(),
            [](const ScoredEntity &a, const ScoredEntity &b) {
              if (a.score.has_value() != b.score.has_value()) {
                return a.score.has_value();
              }
              if (a.score && *a.score != *b.score) return *a.score > *b.score;
              return a.uri < b.uri;
            });
}

// Top-k candidates of a query.
inline std::vector<ScoredEntity> rank(const RelatednessQuery &query,
                                      const ModelSource &models) {
  detail::RelaxedScorer scorer(query.entities, query.slice, query.weights,
                               models);
  if (!scorer.has_query()) {
    throw Error(Errc::kUnresolvableQuery,
                "none of the query entities has a vector around slice '" +
                    query.slice + "'");
  }
  std::vector<ScoredEntity> ranked;
  ranked.reserve(query.candidates.size());
  for (const auto &c : query.candidates) ranked.push_back({c, scorer.score(c)});
  sort_ranking(ranked);
  if (ranked.size() > query.k) ranked.resize(query.k);
  return ranked;
}

// One query per line:
// {"qid", "entities": [...], "slice", "candidates": [...], "k", "weights"}
// "k" defaults to 10 and "weights" to [1, 0, 0].
inline RelatednessQuery parse_query(const std::string &line,
                                    std::size_t line_no) {
  const std::string where = "query line " + std::to_string(line_no) + ": ";
  try {
    auto j = nlohmann::json::parse(line);
    SliceWeights w;
    if (j.contains("weights")) {
      auto ws = j.at("weights").get<std::vector<double>>();
      if (ws.size() != 3) {
        throw Error(Errc::kInvalidArgument, where + "weights needs 3 values");
      }
      w = {ws[0], ws[1], ws[2]};
    }
    std::size_t k = j.contains("k") ? j.at("k").get<std::size_t>() : 10;
    return RelatednessQuery::make(
        j.at("qid").get<std::string>(),
        j.at("entities").get<std::vector<std::string>>(),
        j.at("slice").get<std::string>(),
        j.value("candidates", std::vector<std::string>{}), k, w);
  } catch (const nlohmann::json::exception &e) {
    throw Error(Errc::kMalformedRecord, where + e.what());
  } catch (const Error &e) {
    if (e.code() == Errc::kMalformedRecord) throw;
    throw Error(e.code(), where + e.what());
  }
}

inline std::string format_score(double score) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", score);
  return buf;
}

// TREC run lines: "qid Q0 uri rank score tag", rank from 1.
inline void write_run(std::ostream &out, std::string_view qid,
                      const std::vector<ScoredEntity> &ranked,
                      std::string_view tag) {
  std::size_t r = 1;
  for (const auto &e : ranked) {
    out << qid << " Q0 " << e.uri << ' ' << r++ << ' '
        << format_score(e.score.value_or(kMissingScore)) << ' ' << tag << '\n';
  }
}

}  // namespace tempent
