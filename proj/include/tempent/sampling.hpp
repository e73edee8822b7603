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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "tempent/error.hpp"
#include "tempent/vocabulary.hpp"

namespace tempent {

// Seeded generator with a fixed bit-exact output sequence. The standard
// distributions are implementation-defined, so conversions are done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  std::mt19937_64 engine_;
};

// Negative-sampling distribution: P(i) proportional to count_i^power.
// Sampling uses Vose's alias method, O(1) per draw.
class UnigramTable {
 public:
  UnigramTable() = default;

  explicit UnigramTable(const Vocabulary &vocab, double power = 0.75) {
    if (vocab.empty()) {
      throw Error(Errc::kEmptyVocabulary, "unigram table over empty vocab");
    }
    const std::size_t n = vocab.size();
    probability_.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      probability_[i] = std::pow(static_cast<double>(vocab[i].count), power);
      total += probability_[i];
    }
    for (auto &p : probability_) p /= total;
    build_alias();
  }

  std::size_t size() const { return probability_.size(); }
  double probability(std::size_t i) const { return probability_[i]; }

  std::uint32_t sample(Rng &rng) const {
    const auto i = static_cast<std::uint32_t>(rng.below(size()));
    return rng.uniform() < accept_[i] ? i : alias_[i];
  }

 private:
  void build_alias() {
    const std::size_t n = probability_.size();
    accept_.assign(n, 1.0);
    alias_.resize(n);
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      alias_[i] = static_cast<std::uint32_t>(i);
      scaled[i] = probability_[i] * static_cast<double>(n);
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
      std::uint32_t s = small.back();
      small.pop_back();
      std::uint32_t l = large.back();
      accept_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    // Leftovers are 1 up to rounding.
    for (auto i : small) accept_[i] = 1.0;
    for (auto i : large) accept_[i] = 1.0;
  }

  std::vector<double> probability_;
  std::vector<double> accept_;
  std::vector<std::uint32_t> alias_;
};

// Probability of keeping one occurrence of a token with corpus frequency
// `frequency` under subsampling threshold `t`.
inline double subsample_keep_probability(double frequency, double t) {
  if (frequency <= 0.0) return 1.0;
  const double r = t / frequency;
  return std::min(1.0, std::sqrt(r) + r);
}

}  // namespace tempent
