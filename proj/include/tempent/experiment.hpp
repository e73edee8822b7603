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

#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "tempent/corpus.hpp"
#include "tempent/embedding.hpp"
#include "tempent/eval.hpp"
#include "tempent/modelstore.hpp"
#include "tempent/preprocess.hpp"
#include "tempent/relatedness.hpp"
#include "tempent/vocabulary.hpp"

namespace tempent {

// Documents grouped by slice label.
using SlicedCorpus = std::map<std::string, std::vector<Document>>;

// Preprocess, build the vocabulary, and train one model over `docs`.
inline TrainResult train_slice(const std::vector<Document> &docs,
                               std::string label, bool entity_aware,
                               const TrainParams &params,
                               std::ostream *log = nullptr) {
  auto sequences = preprocess_documents(docs, entity_aware);
  auto vocab = build_vocab(sequences, params.min_count);
  auto result = train_cbow(sequences, vocab, params, log);
  result.model.slice_label = std::move(label);
  result.model.entity_aware = entity_aware;
  return result;
}

inline SlicedCorpus group_by_slice(const std::vector<Document> &docs,
                                   Granularity g) {
  SlicedCorpus out;
  for (const auto &d : docs) out[slice_of(d.timestamp, g)].push_back(d);
  return out;
}

struct Configuration {
  bool time_aware = true;
  bool entity_aware = true;

  std::string name() const {
    if (time_aware && entity_aware) return "time+entity-aware";
    if (time_aware) return "entity-agnostic";
    if (entity_aware) return "time-agnostic";
    return "time+entity-agnostic";
  }
};

// The four combinations, baselines first.
inline std::vector<Configuration> all_configurations() {
  return {{false, false}, {true, false}, {false, true}, {true, true}};
}

// Trains the models a configuration needs and answers every query.
//
// Time-aware configurations train one model per slice and answer each query
// from its slice (and neighbors when relaxed). Time-agnostic ones train a
// single model over the whole corpus. Entity-agnostic models are trained on
// plain tokens, so entities resolve through their label words only.
inline RunResult run_configuration(const SlicedCorpus &slices,
                                   const Configuration &config,
                                   const TrainParams &params,
                                   const std::vector<RelatednessQuery> &queries,
                                   std::ostream *log = nullptr) {
  std::unique_ptr<ModelSource> models;
  if (config.time_aware) {
    auto mem = std::make_unique<InMemoryModels>();
    for (const auto &[label, docs] : slices) {
      if (log) *log << "[" << config.name() << "] training " << label << '\n';
      mem->add(train_slice(docs, label, config.entity_aware, params, log).model);
    }
    models = std::move(mem);
  } else {
    std::vector<Document> all;
    for (const auto &[label, docs] : slices) {
      all.insert(all.end(), docs.begin(), docs.end());
    }
    if (log) *log << "[" << config.name() << "] training whole corpus\n";
    models = std::make_unique<SingleModelSource>(
        train_slice(all, "all", config.entity_aware, params, log).model);
  }
  RunResult run;
  for (const auto &q : queries) {
    run[q.qid] = to_ranked_entries(rank(q, *models));
  }
  return run;
}

inline std::vector<RelatednessQuery> load_queries(
    const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kFileNotFound, "cannot open " + path.string());
  std::vector<RelatednessQuery> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_query(line, line_no));
  }
  return out;
}

}  // namespace tempent
