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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tempent/error.hpp"
#include "tempent/relatedness.hpp"
#include "tempent/stats.hpp"

namespace tempent {

// qid -> (uri -> grade). Unjudged entities have grade 0.
using Grades = std::map<std::string, int>;
using Judgments = std::map<std::string, Grades>;

struct RankedEntry {
  std::string uri;
  double score;
};
// qid -> ranking, best first.
using RunResult = std::map<std::string, std::vector<RankedEntry>>;

enum class Gain { kExponential, kLinear };

inline constexpr int kMaxGrade = 10;

inline double gain_of(int grade, Gain gain) {
  return gain == Gain::kExponential ? std::exp2(grade) - 1.0 : grade;
}

inline double discounted_gain(std::span<const int> grades, std::size_t k,
                              Gain gain) {
  double dcg = 0;
  const std::size_t n = std::min(k, grades.size());
  for (std::size_t i = 0; i < n; ++i) {
    dcg += gain_of(grades[i], gain) / std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg;
}

// nDCG@k of `ranking` against graded judgments. Zero when no judged entity
// has a positive grade.
inline double ndcg_at_k(std::span<const std::string> ranking,
                        const Grades &grades, std::size_t k,
                        Gain gain = Gain::kExponential) {
  if (k < 1) throw Error(Errc::kInvalidArgument, "k must be >= 1");
  std::vector<int> ranked;
  ranked.reserve(ranking.size());
  for (const auto &uri : ranking) {
    auto it = grades.find(uri);
    ranked.push_back(it == grades.end() ? 0 : it->second);
  }
  std::vector<int> ideal;
  for (const auto &[uri, g] : grades) ideal.push_back(g);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double idcg = discounted_gain(ideal, k, gain);
  if (idcg == 0) return 0.0;
  return discounted_gain(ranked, k, gain) / idcg;
}

// TREC qrels: "qid iter uri grade" per line.
inline Judgments parse_qrels(std::istream &in) {
  Judgments j;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string qid, iter, uri, grade_text;
    if (!(ss >> qid)) continue;
    std::string extra;
    if (!(ss >> iter >> uri >> grade_text) || (ss >> extra)) {
      throw Error(Errc::kMalformedRecord,
                  "qrels line " + std::to_string(line_no) +
                      ": expected 'qid iter uri grade'");
    }
    std::size_t used = 0;
    int grade = -1;
    try {
      grade = std::stoi(grade_text, &used);
    } catch (const std::exception &) {
    }
    if (used != grade_text.size() || grade < 0 || grade > kMaxGrade) {
      throw Error(Errc::kMalformedRecord,
                  "qrels line " + std::to_string(line_no) + ": grade '" +
                      grade_text + "' is not an integer in [0, 10]");
    }
    j[qid][uri] = grade;
  }
  return j;
}

inline Judgments load_qrels(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kFileNotFound, "cannot open " + path.string());
  return parse_qrels(in);
}

// TREC run: "qid Q0 uri rank score tag" per line. Entries are ordered by
// their rank field.
inline RunResult parse_run(std::istream &in) {
  std::map<std::string, std::vector<std::pair<long, RankedEntry>>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string qid, q0, uri, tag;
    long rank_no = 0;
    double score = 0;
    if (!(ss >> qid)) continue;
    if (!(ss >> q0 >> uri >> rank_no >> score >> tag)) {
      throw Error(Errc::kMalformedRecord,
                  "run line " + std::to_string(line_no) +
                      ": expected 'qid Q0 uri rank score tag'");
    }
    rows[qid].push_back({rank_no, {uri, score}});
  }
  RunResult run;
  for (auto &[qid, entries] : rows) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto &a, const auto &b) { return a.first < b.first; });
    auto &out = run[qid];
    for (auto &e : entries) {
      if (!out.empty() && e.second.score > out.back().score) {
        throw Error(Errc::kMalformedRecord,
                    "run for qid '" + qid + "' has scores increasing with rank");
      }
      out.push_back(std::move(e.second));
    }
  }
  return run;
}

inline RunResult load_run(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kFileNotFound, "cannot open " + path.string());
  return parse_run(in);
}

inline std::vector<RankedEntry> to_ranked_entries(
    const std::vector<ScoredEntity> &ranked) {
  std::vector<RankedEntry> out;
  out.reserve(ranked.size());
  for (const auto &e : ranked) {
    out.push_back({e.uri, e.score.value_or(kMissingScore)});
  }
  return out;
}

inline void write_run(std::ostream &out, const RunResult &run,
                      std::string_view tag) {
  for (const auto &[qid, entries] : run) {
    std::size_t r = 1;
    for (const auto &e : entries) {
      out << qid << " Q0 " << e.uri << ' ' << r++ << ' '
          << format_score(e.score) << ' ' << tag << '\n';
    }
  }
}

// Per-query nDCG at each cutoff, plus means over queries.
struct EvalTable {
  std::vector<std::size_t> ks;
  std::map<std::string, std::vector<double>> per_query;  // qid -> by k
  std::vector<double> mean;                              // by k

  // Scores at cutoff index `ki`, ordered by qid.
  std::vector<double> column(std::size_t ki) const {
    std::vector<double> out;
    for (const auto &[qid, v] : per_query) out.push_back(v[ki]);
    return out;
  }
};

inline EvalTable evaluate_run(const RunResult &run, const Judgments &judgments,
                              const std::vector<std::size_t> &ks,
                              Gain gain = Gain::kExponential) {
  if (ks.empty()) throw Error(Errc::kInvalidArgument, "no cutoffs given");
  EvalTable t;
  t.ks = ks;
  for (const auto &[qid, entries] : run) {
    auto it = judgments.find(qid);
    if (it == judgments.end()) {
      throw Error(Errc::kUnknownQid, "qid '" + qid + "' has no judgments");
    }
    std::vector<std::string> uris;
    for (const auto &e : entries) uris.push_back(e.uri);
    auto &row = t.per_query[qid];
    for (auto k : ks) row.push_back(ndcg_at_k(uris, it->second, k, gain));
  }
  t.mean.assign(ks.size(), 0.0);
  if (!t.per_query.empty()) {
    // Sums follow qid order, so means do not depend on the run's order.
    for (const auto &[qid, row] : t.per_query) {
      for (std::size_t i = 0; i < ks.size(); ++i) t.mean[i] += row[i];
    }
    for (auto &m : t.mean) m /= static_cast<double>(t.per_query.size());
  }
  return t;
}

struct Comparison {
  std::size_t k;
  std::optional<TTestResult> test;  // empty when the runs do not differ
};

// Paired t-test per cutoff over the union of both tables' queries; a query
// missing from one table scores 0 there.
inline std::vector<Comparison> compare_tables(const EvalTable &a,
                                              const EvalTable &b) {
  if (a.ks != b.ks) {
    throw Error(Errc::kInvalidArgument, "tables use different cutoffs");
  }
  std::map<std::string, std::pair<const std::vector<double> *,
                                  const std::vector<double> *>>
      rows;
  for (const auto &[q, v] : a.per_query) rows[q].first = &v;
  for (const auto &[q, v] : b.per_query) rows[q].second = &v;
  std::vector<Comparison> out;
  for (std::size_t i = 0; i < a.ks.size(); ++i) {
    std::vector<double> xa, xb;
    for (const auto &[q, p] : rows) {
      xa.push_back(p.first ? (*p.first)[i] : 0.0);
      xb.push_back(p.second ? (*p.second)[i] : 0.0);
    }
    // Identical columns are "no difference" whatever the query count.
    Comparison c{a.ks[i], std::nullopt};
    if (xa != xb) c.test = paired_t_test(xa, xb);
    out.push_back(c);
  }
  return out;
}

inline std::vector<std::size_t> parse_cutoffs(std::string_view text) {
  std::vector<std::size_t> ks;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string item(text.substr(pos, comma - pos));
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(item, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (item.empty() || used != item.size() || v < 1) {
      throw Error(Errc::kInvalidArgument, "bad cutoff list '" +
                                              std::string(text) + "'");
    }
    ks.push_back(static_cast<std::size_t>(v));
    pos = comma + 1;
  }
  return ks;
}

inline std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

inline void print_table(std::ostream &out, const EvalTable &t) {
  out << "nDCG@k   mean     queries=" << t.per_query.size() << '\n';
  for (std::size_t i = 0; i < t.ks.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "k=%-6zu %s\n", t.ks[i],
                  fixed(t.mean[i]).c_str());
    out << buf;
  }
}

// Marker appended to significant improvements.
inline constexpr std::string_view kSignificantMark = "‡";

inline void print_comparison(std::ostream &out, const EvalTable &a,
                             const EvalTable &b,
                             const std::vector<Comparison> &cmp) {
  out << "nDCG@k   run-a    run-b    diff      t          p\n";
  for (std::size_t i = 0; i < cmp.size(); ++i) {
    char buf[160];
    const auto &c = cmp[i];
    if (!c.test) {
      std::snprintf(buf, sizeof(buf), "k=%-6zu %s   %s   no difference\n",
                    c.k, fixed(a.mean[i]).c_str(), fixed(b.mean[i]).c_str());
      out << buf;
      continue;
    }
    std::snprintf(buf, sizeof(buf), "k=%-6zu %s   %s   %+.4f   %-9.4g  %.4g",
                  c.k, fixed(a.mean[i]).c_str(), fixed(b.mean[i]).c_str(),
                  c.test->mean_diff, c.test->t, c.test->p);
    out << buf;
    if (c.test->significant() && c.test->mean_diff > 0) {
      out << ' ' << kSignificantMark;
    }
    out << '\n';
  }
}

inline nlohmann::ordered_json report_json(
    std::string_view config, const EvalTable &t,
    const std::vector<std::pair<std::string, std::vector<Comparison>>>
        &t_tests = {}) {
  nlohmann::ordered_json j;
  j["config"] = config;
  j["k"] = t.ks;
  nlohmann::ordered_json means = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < t.ks.size(); ++i) {
    means[std::to_string(t.ks[i])] = t.mean[i];
  }
  j["mean_ndcg"] = means;
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto &[qid, row] : t.per_query) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < t.ks.size(); ++i) {
      r[std::to_string(t.ks[i])] = row[i];
    }
    per[qid] = r;
  }
  j["per_query"] = per;
  j["t_tests"] = nlohmann::ordered_json::array();
  for (const auto &[against, cmps] : t_tests) {
    for (const auto &c : cmps) {
      nlohmann::ordered_json r;
      r["against"] = against;
      r["k"] = c.k;
      if (c.test) {
        r["mean_diff"] = c.test->mean_diff;
        // JSON has no infinity; an infinite t is reported as null.
        r["t"] = std::isfinite(c.test->t) ? nlohmann::ordered_json(c.test->t)
                                          : nlohmann::ordered_json(nullptr);
        r["p"] = c.test->p;
        r["significant"] = c.test->significant();
      } else {
        r["no_difference"] = true;
      }
      j["t_tests"].push_back(r);
    }
  }
  return j;
}

}  // namespace tempent
