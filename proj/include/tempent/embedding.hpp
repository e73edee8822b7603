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
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "tempent/cbow.hpp"
#include "tempent/error.hpp"
#include "tempent/preprocess.hpp"
#include "tempent/sampling.hpp"
#include "tempent/vocabulary.hpp"

namespace tempent {

struct TrainParams {
  std::uint32_t dim = 300;
  std::uint32_t window = 5;
  std::uint64_t min_count = 5;
  std::uint32_t negatives = 5;
  std::uint32_t epochs = 5;
  double initial_lr = 0.05;
  double lr_floor_fraction = 1e-4;
  // Subsampling is disabled for t >= 1.
  double subsample_t = 1e-3;
  std::uint64_t seed = 1;
  std::uint32_t workers = 1;

  void validate() const {
    auto bad = [](const std::string &what) {
      throw Error(Errc::kInvalidArgument, what);
    };
    if (dim < 1) bad("dim must be >= 1");
    if (window < 1) bad("window must be >= 1");
    if (min_count < 1) bad("min_count must be >= 1");
    if (epochs < 1) bad("epochs must be >= 1");
    if (workers < 1) bad("workers must be >= 1");
    if (!(initial_lr > 0)) bad("learning rate must be > 0");
    if (!(lr_floor_fraction > 0 && lr_floor_fraction < 1)) {
      bad("lr floor fraction must be in (0, 1)");
    }
    if (!(subsample_t >= 0)) bad("subsample threshold must be >= 0");
  }
};

// One slice's embedding model. Row i of each matrix belongs to vocab[i].
struct EmbeddingModel {
  std::string slice_label;
  bool entity_aware = true;
  std::uint32_t dim = 0;
  Vocabulary vocab;
  std::vector<float> input;   // word vectors
  std::vector<float> output;  // context (negative-sampling) vectors

  MatrixView<float> input_view() { return {input.data(), vocab.size(), dim}; }
  MatrixView<float> output_view() { return {output.data(), vocab.size(), dim}; }
  MatrixView<const float> input_view() const {
    return {input.data(), vocab.size(), dim};
  }
  MatrixView<const float> output_view() const {
    return {output.data(), vocab.size(), dim};
  }

  std::span<const float> row(std::uint32_t i) const {
    return input_view().row(i);
  }

  bool all_finite() const {
    for (float v : input) {
      if (!std::isfinite(v)) return false;
    }
    for (float v : output) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  friend bool operator==(const EmbeddingModel &,
                         const EmbeddingModel &) = default;
};

inline EmbeddingModel init_model(const Vocabulary &vocab,
                                 const TrainParams &params) {
  if (vocab.empty()) {
    throw Error(Errc::kEmptyVocabulary, "cannot initialize an empty model");
  }
  params.validate();
  EmbeddingModel m;
  m.dim = params.dim;
  m.vocab = vocab;
  const std::size_t n = vocab.size() * params.dim;
  m.input.resize(n);
  m.output.assign(n, 0.0f);
  Rng rng(params.seed);
  const double scale = 1.0 / params.dim;
  for (auto &v : m.input) v = static_cast<float>((rng.uniform() - 0.5) * scale);
  return m;
}

// Scratch buffers reused across steps.
using CbowWorkspace = CbowGradient<float>;

// One SGD step on a single (context, target, negatives) example. Returns
// the loss evaluated before the update.
inline float cbow_step(EmbeddingModel &model,
                       std::span<const std::uint32_t> context,
                       std::uint32_t target,
                       std::span<const std::uint32_t> negatives, float lr,
                       CbowWorkspace &ws) {
  cbow_gradient<float>(std::as_const(model).input_view(),
                       std::as_const(model).output_view(), context, target,
                       negatives, ws);
  apply_cbow_gradient<float>(model.input_view(), model.output_view(), context,
                             ws, lr);
  return ws.loss;
}

inline float cbow_step(EmbeddingModel &model,
                       std::span<const std::uint32_t> context,
                       std::uint32_t target,
                       std::span<const std::uint32_t> negatives, float lr) {
  CbowWorkspace ws;
  return cbow_step(model, context, target, negatives, lr, ws);
}

inline std::optional<std::span<const float>> wordvec(
    const EmbeddingModel &model, std::string_view token) {
  auto i = model.vocab.find(token);
  if (!i) return std::nullopt;
  return model.row(*i);
}

struct TrainResult {
  EmbeddingModel model;
  std::vector<double> epoch_mean_loss;
  std::uint64_t steps = 0;
};

namespace detail {

struct EpochStats {
  double loss = 0;
  std::uint64_t steps = 0;
};

struct TrainContext {
  const TrainParams &params;
  const UnigramTable &table;
  const std::vector<double> &keep_prob;
  std::uint64_t total_positions;
  std::atomic<std::uint64_t> &processed;
};

// Trains over one shard of index sequences for one epoch.
inline EpochStats train_shard(
    EmbeddingModel &model, const TrainContext &ctx,
    std::span<const std::vector<std::uint32_t>> shard, Rng &rng) {
  const auto &p = ctx.params;
  const double lr_floor = p.initial_lr * p.lr_floor_fraction;
  const std::uint32_t negatives = model.vocab.size() > 1 ? p.negatives : 0;
  EpochStats stats;
  CbowWorkspace ws;
  std::vector<std::uint32_t> kept, kept_pos, context, neg;
  for (const auto &seq : shard) {
    kept.clear();
    kept_pos.clear();
    for (std::uint32_t i = 0; i < seq.size(); ++i) {
      const double keep = ctx.keep_prob[seq[i]];
      if (keep >= 1.0 || rng.uniform() < keep) {
        kept.push_back(seq[i]);
        kept_pos.push_back(i);
      }
    }
    const std::uint64_t base = ctx.processed.fetch_add(seq.size());
    for (std::size_t pos = 0; pos < kept.size(); ++pos) {
      const double progress = static_cast<double>(base + kept_pos[pos]) /
                              static_cast<double>(ctx.total_positions + 1);
      const double lr = std::max(lr_floor, p.initial_lr * (1.0 - progress));

      const auto b = static_cast<std::size_t>(1 + rng.below(p.window));
      context.clear();
      const std::size_t lo = pos >= b ? pos - b : 0;
      const std::size_t hi = std::min(kept.size(), pos + b + 1);
      for (std::size_t c = lo; c < hi; ++c) {
        if (c != pos) context.push_back(kept[c]);
      }
      if (context.empty()) continue;

      const std::uint32_t target = kept[pos];
      neg.clear();
      while (neg.size() < negatives) {
        const std::uint32_t s = ctx.table.sample(rng);
        if (s != target) neg.push_back(s);
      }
      stats.loss += cbow_step(model, context, target, neg,
                              static_cast<float>(lr), ws);
      ++stats.steps;
    }
  }
  return stats;
}

}  // namespace detail

// Trains a CBOW negative-sampling model over one slice.
//
// With workers == 1 the result is a deterministic function of the inputs.
// With more workers, sequences are split into contiguous shards trained
// concurrently against the shared matrices without locking (asynchronous
// SGD); lost updates are accepted and the result is not reproducible.
inline TrainResult train_cbow(const std::vector<TokenSequence> &sequences,
                              const Vocabulary &vocab,
                              const TrainParams &params,
                              std::ostream *log = nullptr) {
  params.validate();
  if (vocab.empty()) {
    throw Error(Errc::kEmptyVocabulary, "vocabulary is empty");
  }
  std::vector<std::vector<std::uint32_t>> indexed;
  indexed.reserve(sequences.size());
  std::uint64_t positions = 0;
  bool trainable = false;
  for (const auto &s : sequences) {
    std::vector<std::uint32_t> ids;
    ids.reserve(s.tokens.size());
    for (const auto &t : s.tokens) {
      if (auto i = vocab.find(t)) ids.push_back(*i);
    }
    if (ids.size() >= 2) trainable = true;
    positions += ids.size();
    if (!ids.empty()) indexed.push_back(std::move(ids));
  }
  if (!trainable) {
    throw Error(Errc::kEmptyCorpus,
                "no sequence has two in-vocabulary tokens to train on");
  }

  std::vector<double> keep_prob(vocab.size(), 1.0);
  if (params.subsample_t < 1.0) {
    const double total = static_cast<double>(vocab.total_count());
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      keep_prob[i] = subsample_keep_probability(
          static_cast<double>(vocab[i].count) / total, params.subsample_t);
    }
  }

  TrainResult result{init_model(vocab, params), {}, 0};
  UnigramTable table(vocab);
  std::atomic<std::uint64_t> processed{0};
  detail::TrainContext ctx{params, table, keep_prob, positions * params.epochs,
                           processed};

  const std::size_t workers =
      std::min<std::size_t>(params.workers, indexed.size());
  std::vector<Rng> rngs;
  for (std::size_t w = 0; w < workers; ++w) {
    rngs.emplace_back(params.seed ^ (0x9E3779B97F4A7C15ULL * (w + 1)));
  }

  for (std::uint32_t epoch = 1; epoch <= params.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t before = processed.load();
    detail::EpochStats total;
    if (workers == 1) {
      total = detail::train_shard(result.model, ctx, indexed, rngs[0]);
    } else {
      std::vector<detail::EpochStats> stats(workers);
      std::vector<std::thread> threads;
      const std::size_t per = (indexed.size() + workers - 1) / workers;
      for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = std::min(indexed.size(), w * per);
        const std::size_t hi = std::min(indexed.size(), lo + per);
        std::span<const std::vector<std::uint32_t>> shard(indexed.data() + lo,
                                                          hi - lo);
        threads.emplace_back([&, shard, w] {
          stats[w] = detail::train_shard(result.model, ctx, shard, rngs[w]);
        });
      }
      for (auto &t : threads) t.join();
      for (const auto &s : stats) {
        total.loss += s.loss;
        total.steps += s.steps;
      }
    }
    const double mean = total.steps ? total.loss / total.steps : 0.0;
    result.epoch_mean_loss.push_back(mean);
    result.steps += total.steps;
    if (log) {
      const double secs = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
      const double rate =
          secs > 0 ? static_cast<double>(processed.load() - before) / secs : 0;
      *log << "epoch " << epoch << "/" << params.epochs << "  tokens/sec "
           << static_cast<std::uint64_t>(rate) << "  mean loss " << mean
           << '\n';
    }
  }
  if (!result.model.all_finite()) {
    throw Error(Errc::kInvalidArgument,
                "training diverged (non-finite parameters); lower the "
                "learning rate");
  }
  return result;
}

}  // namespace tempent
