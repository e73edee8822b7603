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

// Command-line driver: slice, train, query, eval, compare, experiment.
//
// Exit codes: 0 success, 1 data or model error, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tempent/tempent.hpp"

namespace fs = std::filesystem;
using namespace tempent;

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

// Splices the flags stored in `--args-file PATH` into the command line.
// The file holds whitespace-separated arguments; '#' starts a comment.
std::vector<std::string> expand_args_file(int argc, char **argv) {
  std::vector<std::string> out;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    std::string path;
    if (arg == "--args-file") {
      if (i + 1 >= argc) throw CLI::ValidationError("--args-file needs a path");
      path = argv[++i];
    } else if (arg.rfind("--args-file=", 0) == 0) {
      path = arg.substr(12);
    } else {
      out.push_back(arg);
      continue;
    }
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("cannot read args file " + path);
    std::string line;
    while (std::getline(in, line)) {
      line = line.substr(0, line.find('#'));
      std::istringstream words(line);
      for (std::string w; words >> w;) out.push_back(w);
    }
  }
  return out;
}

std::vector<std::string> split_commas(const std::string &s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

SliceWeights parse_weights(const std::string &text) {
  auto parts = split_commas(text);
  if (parts.size() != 3) {
    throw CLI::ValidationError("--weights", "expected three values w1,w2,w3");
  }
  double w[3];
  for (int i = 0; i < 3; ++i) {
    std::size_t used = 0;
    try {
      w[i] = std::stod(parts[i], &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used != parts[i].size()) {
      throw CLI::ValidationError("--weights", "not a number: " + parts[i]);
    }
  }
  SliceWeights sw{w[0], w[1], w[2]};
  if (!sw.valid()) {
    throw CLI::ValidationError(
        "--weights", "weights must be non-negative and sum to 1, got " + text);
  }
  return sw;
}

std::vector<std::size_t> cutoffs_or_usage(const std::string &text) {
  try {
    return parse_cutoffs(text);
  } catch (const Error &e) {
    throw CLI::ValidationError("--k", e.what());
  }
}

std::vector<std::string> read_uri_list(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kFileNotFound, "cannot open " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == '#') continue;
    auto e = line.find_last_not_of(" \t");
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

void write_json(const fs::path &path, const nlohmann::ordered_json &j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(Errc::kWriteFailure, "cannot write " + path.string());
}

struct TrainFlags {
  TrainParams params;
  bool entity_aware = true;
};

void add_train_flags(CLI::App *cmd, TrainFlags &f) {
  auto &p = f.params;
  cmd->add_option("--dim", p.dim, "Vector dimension")
      ->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--window", p.window, "Maximum context window")
      ->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--min-count", p.min_count, "Minimum token count")
      ->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--negative", p.negatives, "Negative samples per target")
      ->capture_default_str();
  cmd->add_option("--epochs", p.epochs, "Passes over the data")
      ->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--lr", p.initial_lr, "Initial learning rate")
      ->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--subsample", p.subsample_t,
                  "Frequent-token subsampling threshold (>= 1 disables)")
      ->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--seed", p.seed, "Random seed")->capture_default_str();
  cmd->add_option("--workers", p.workers, "Training threads")
      ->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--entity-aware", f.entity_aware,
                  "Replace mentions by entity IDs (true) or keep plain words")
      ->capture_default_str();
}

// ---------------------------------------------------------------- slice

struct SliceArgs {
  std::string input, granularity, out;
  bool strict = false;
};

int cmd_slice(const SliceArgs &a) {
  const Granularity g = *parse_granularity(a.granularity);
  CorpusReader reader(a.input,
                      a.strict ? RejectPolicy::kThrow : RejectPolicy::kSkip,
                      std::nullopt, [](const Diagnostic &d) {
                        std::cerr << "warning: " << d.message << '\n';
                      });
  auto counts = slice_corpus(reader, g, a.out);
  std::size_t total = 0;
  for (const auto &[label, n] : counts) {
    std::cout << label << '\t' << n << '\n';
    total += n;
  }
  std::cout << "slices " << counts.size() << ", documents " << total;
  if (!reader.diagnostics().empty()) {
    std::cout << ", rejected " << reader.diagnostics().size();
  }
  std::cout << '\n';
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string slice_file, out, label;
  TrainFlags flags;
};

int cmd_train(const TrainArgs &a) {
  const fs::path in(a.slice_file);
  const std::string label = a.label.empty() ? in.stem().string() : a.label;
  auto docs = load_corpus(in);
  auto sequences = preprocess_documents(docs, a.flags.entity_aware);
  auto vocab = build_vocab(sequences, a.flags.params.min_count);
  std::cout << "vocabulary " << vocab.size() << ", tokens "
            << vocab.total_count() << '\n';
  auto result = train_cbow(sequences, vocab, a.flags.params, &std::cerr);
  result.model.slice_label = label;
  result.model.entity_aware = a.flags.entity_aware;

  fs::path out(a.out);
  if (fs::is_directory(out) || a.out.back() == '/') {
    out /= model_filename(label, a.flags.entity_aware);
  }
  save_model(result.model, out);
  if (result.steps == 0) {
    // Everything was subsampled away; the model is still written.
    std::cout << "final mean loss n/a (no training steps; try a larger "
                 "--subsample)\n";
  } else {
    std::cout << "final mean loss " << fixed(result.epoch_mean_loss.back(), 6)
              << '\n';
  }
  std::cout << "wrote " << out.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- query

struct QueryArgs {
  std::string models, slice, entities, candidates, queries, weights = "1,0,0",
                                                           out, tag = "tempent";
  std::size_t k = 10;
  bool entity_aware = true;
};

int cmd_query(const QueryArgs &a) {
  std::vector<RelatednessQuery> queries;
  if (!a.queries.empty()) {
    queries = load_queries(a.queries);
  } else {
    if (a.entities.empty() || a.slice.empty() || a.candidates.empty()) {
      throw CLI::ValidationError(
          "query needs --queries, or --entities, --slice and --candidates");
    }
    const SliceWeights w = parse_weights(a.weights);
    try {
      parse_slice_label(a.slice);
    } catch (const Error &e) {
      throw CLI::ValidationError("--slice", e.what());
    }
    queries.push_back(RelatednessQuery::make("q1", split_commas(a.entities),
                                             a.slice,
                                             read_uri_list(a.candidates), a.k,
                                             w));
  }
  auto registry = ModelRegistry::open(a.models, &std::cerr);
  auto models = registry.view(a.entity_aware);

  std::ofstream run_file;
  if (!a.out.empty()) {
    run_file.open(a.out, std::ios::binary | std::ios::trunc);
    if (!run_file) throw Error(Errc::kWriteFailure, "cannot write " + a.out);
  }
  for (const auto &q : queries) {
    auto ranked = rank(q, models);
    write_run(std::cout, q.qid, ranked, a.tag);
    if (run_file.is_open()) write_run(run_file, q.qid, ranked, a.tag);
  }
  if (run_file.is_open()) {
    run_file.close();
    if (!run_file) throw Error(Errc::kWriteFailure, "cannot write " + a.out);
  }
  return 0;
}

// ------------------------------------------------------- eval / compare

struct EvalArgs {
  std::string run, run_b, qrels, k = "5,10,20,30", gain = "exp", report,
                                 config;
};

Gain gain_of_flag(const std::string &g) {
  return g == "linear" ? Gain::kLinear : Gain::kExponential;
}

int cmd_eval(const EvalArgs &a) {
  const auto ks = cutoffs_or_usage(a.k);
  auto table = evaluate_run(load_run(a.run), load_qrels(a.qrels), ks,
                            gain_of_flag(a.gain));
  print_table(std::cout, table);
  if (!a.report.empty()) {
    write_json(a.report,
               report_json(a.config.empty() ? fs::path(a.run).stem().string()
                                            : a.config,
                           table));
  }
  return 0;
}

int cmd_compare(const EvalArgs &a) {
  const auto ks = cutoffs_or_usage(a.k);
  const auto qrels = load_qrels(a.qrels);
  const Gain gain = gain_of_flag(a.gain);
  auto ta = evaluate_run(load_run(a.run), qrels, ks, gain);
  auto tb = evaluate_run(load_run(a.run_b), qrels, ks, gain);
  auto cmp = compare_tables(ta, tb);
  print_comparison(std::cout, ta, tb, cmp);
  if (!a.report.empty()) {
    const std::string name = a.config.empty()
                                 ? fs::path(a.run).stem().string()
                                 : a.config;
    write_json(a.report,
               report_json(name, ta,
                           {{fs::path(a.run_b).stem().string(), cmp}}));
  }
  return 0;
}

// ----------------------------------------------------------- experiment

struct ExperimentArgs {
  std::string corpus, granularity = "month", queries, qrels, out, k = "5,10,20,30";
  TrainFlags flags;
};

// Runs all four model configurations over one corpus and compares the
// time+entity-aware one against each of the others.
int cmd_experiment(const ExperimentArgs &a) {
  const auto ks = cutoffs_or_usage(a.k);
  const Granularity g = *parse_granularity(a.granularity);
  const auto slices = group_by_slice(load_corpus(a.corpus), g);
  const auto queries = load_queries(a.queries);
  const auto qrels = load_qrels(a.qrels);
  fs::create_directories(a.out);

  std::vector<std::pair<std::string, EvalTable>> tables;
  for (const auto &config : all_configurations()) {
    auto run = run_configuration(slices, config, a.flags.params, queries,
                                 &std::cerr);
    const fs::path run_path = fs::path(a.out) / (config.name() + ".run");
    std::ofstream f(run_path, std::ios::binary | std::ios::trunc);
    write_run(f, run, config.name());
    if (!f) throw Error(Errc::kWriteFailure, "cannot write " + run_path.string());
    tables.emplace_back(config.name(), evaluate_run(run, qrels, ks));
  }
  const auto &[best_name, best] = tables.back();
  nlohmann::ordered_json report = nlohmann::ordered_json::array();
  for (const auto &[name, table] : tables) {
    std::cout << "== " << name << '\n';
    print_table(std::cout, table);
    std::vector<std::pair<std::string, std::vector<Comparison>>> tests;
    if (name != best_name) {
      auto cmp = compare_tables(best, table);
      std::cout << "-- " << best_name << " vs " << name << '\n';
      print_comparison(std::cout, best, table, cmp);
      tests.emplace_back(best_name, cmp);
    }
    report.push_back(report_json(name, table, tests));
  }
  write_json(fs::path(a.out) / "report.json", report);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Time- and entity-aware word embeddings for entity relatedness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tempent 0.1.0");
  app.add_option("--args-file", "Read further flags from a file")
      ->check(CLI::ExistingFile);

  const std::vector<std::string> granularities = {"day", "week", "month",
                                                  "year"};

  SliceArgs slice;
  auto *c_slice = app.add_subcommand("slice", "Split a corpus into time slices");
  c_slice->add_option("--input", slice.input, "Corpus JSONL file")
      ->required()->check(CLI::ExistingFile);
  c_slice->add_option("--granularity", slice.granularity)
      ->required()->check(CLI::IsMember(granularities));
  c_slice->add_option("--out", slice.out, "Output directory")->required();
  c_slice->add_flag("--strict", slice.strict,
                    "Fail on the first invalid record instead of skipping it");

  TrainArgs train;
  auto *c_train = app.add_subcommand("train", "Train a model on one slice file");
  c_train->add_option("--slice-file", train.slice_file)
      ->required()->check(CLI::ExistingFile);
  c_train->add_option("--out", train.out,
                      "Model file, or a directory to place <label>.temb in")
      ->required();
  c_train->add_option("--label", train.label,
                      "Slice label (default: slice file name)");
  add_train_flags(c_train, train.flags);

  QueryArgs query;
  auto *c_query = app.add_subcommand("query", "Rank candidates for a query");
  c_query->add_option("--models", query.models, "Model directory")
      ->required()->check(CLI::ExistingDirectory);
  c_query->add_option("--slice", query.slice, "Slice label of the query");
  c_query->add_option("--entities", query.entities,
                      "Comma-separated query entity URIs");
  c_query->add_option("--candidates", query.candidates,
                      "File with one candidate URI per line")
      ->check(CLI::ExistingFile);
  c_query->add_option("--queries", query.queries,
                      "JSONL file of queries (instead of the flags above)")
      ->check(CLI::ExistingFile);
  c_query->add_option("--k", query.k, "Result list length")
      ->capture_default_str()->check(CLI::PositiveNumber);
  c_query->add_option("--weights", query.weights,
                      "Weights of the slice, previous and next slice")
      ->capture_default_str();
  c_query->add_option("--entity-aware", query.entity_aware,
                       "Use entity-aware (true) or agnostic models")
      ->capture_default_str();
  c_query->add_option("--out", query.out, "TREC run file to write");
  c_query->add_option("--tag", query.tag, "Run tag")->capture_default_str();

  EvalArgs eval;
  auto *c_eval = app.add_subcommand("eval", "nDCG of a run");
  c_eval->add_option("--run", eval.run)->required()->check(CLI::ExistingFile);
  c_eval->add_option("--qrels", eval.qrels)->required()->check(CLI::ExistingFile);

  EvalArgs compare;
  auto *c_compare =
      app.add_subcommand("compare", "Paired t-test between two runs");
  c_compare->add_option("--run-a", compare.run)
      ->required()->check(CLI::ExistingFile);
  c_compare->add_option("--run-b", compare.run_b)
      ->required()->check(CLI::ExistingFile);
  c_compare->add_option("--qrels", compare.qrels)
      ->required()->check(CLI::ExistingFile);

  for (auto [cmd, args] : {std::pair{c_eval, &eval}, {c_compare, &compare}}) {
    cmd->add_option("--k", args->k, "Comma-separated cutoffs")
        ->capture_default_str();
    cmd->add_option("--gain", args->gain, "Gain function")
        ->capture_default_str()->check(CLI::IsMember({"exp", "linear"}));
    cmd->add_option("--report", args->report, "Write a JSON report here");
    cmd->add_option("--config", args->config, "Name used in the report");
  }

  ExperimentArgs exp;
  auto *c_exp = app.add_subcommand(
      "experiment", "Train and evaluate all four configurations");
  c_exp->add_option("--corpus", exp.corpus)->required()->check(CLI::ExistingFile);
  c_exp->add_option("--granularity", exp.granularity)
      ->capture_default_str()->check(CLI::IsMember(granularities));
  c_exp->add_option("--queries", exp.queries)
      ->required()->check(CLI::ExistingFile);
  c_exp->add_option("--qrels", exp.qrels)->required()->check(CLI::ExistingFile);
  c_exp->add_option("--out", exp.out, "Directory for runs and report")
      ->required();
  c_exp->add_option("--k", exp.k)->capture_default_str();
  add_train_flags(c_exp, exp.flags);

  try {
    auto args = expand_args_file(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
    if (*c_slice) return cmd_slice(slice);
    if (*c_train) return cmd_train(train);
    if (*c_query) return cmd_query(query);
    if (*c_eval) return cmd_eval(eval);
    if (*c_compare) return cmd_compare(compare);
    if (*c_exp) return cmd_experiment(exp);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
