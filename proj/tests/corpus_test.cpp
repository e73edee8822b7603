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

#include <gtest/gtest.h>

#include "support/tempdir.hpp"
#include "tempent/corpus.hpp"

namespace tempent {
namespace {

using testing::TempDir;
using testing::write_file;

const std::string kNibali =
    R"({"doc_id":"a1","timestamp":"2014-07-15","text":"Nibali wins","mentions":[{"start":0,"end":6,"surface":"Nibali","uri":"https://en.wikipedia.org/wiki/Vincenzo_Nibali"}]})";

Errc code_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::kInvalidArgument;
}

std::string doc_line(const std::string &id, const std::string &date) {
  return R"({"doc_id":")" + id + R"(","timestamp":")" + date +
         R"(","text":"x","mentions":[]})";
}

TEST(ParseDocument, ValidRecord) {
  Document d = parse_document(kNibali, 1);
  EXPECT_EQ(d.doc_id, "a1");
  EXPECT_EQ(format_date(d.timestamp), "2014-07-15");
  EXPECT_EQ(d.text, "Nibali wins");
  ASSERT_EQ(d.mentions.size(), 1u);
  EXPECT_EQ(d.mentions[0].start, 0u);
  EXPECT_EQ(d.mentions[0].end, 6u);
  EXPECT_EQ(d.mentions[0].uri, "https://en.wikipedia.org/wiki/Vincenzo_Nibali");
}

TEST(ParseDocument, SurfaceMismatch) {
  std::string line = kNibali;
  line.replace(line.find("\"surface\":\"Nibali\""), 18, "\"surface\":\"Nibal\"");
  EXPECT_EQ(code_of([&] { parse_document(line, 3); }), Errc::kOffsetMismatch);
}

TEST(ParseDocument, Rejections) {
  EXPECT_EQ(code_of([] { parse_document("{not json", 1); }),
            Errc::kMalformedRecord);
  EXPECT_EQ(code_of([] { parse_document(R"({"doc_id":"a"})", 1); }),
            Errc::kMalformedRecord);
  EXPECT_EQ(code_of([] { parse_document(doc_line("a", "2014-13-01"), 1); }),
            Errc::kInvalidTimestamp);
  EXPECT_EQ(code_of([] { parse_document(doc_line("a", "15/07/2014"), 1); }),
            Errc::kInvalidTimestamp);
  // Span outside the text.
  std::string line = kNibali;
  line.replace(line.find("\"end\":6"), 7, "\"end\":60");
  EXPECT_EQ(code_of([&] { parse_document(line, 1); }), Errc::kOffsetMismatch);
}

TEST(ParseDocument, ErrorNamesLine) {
  try {
    parse_document("{", 42);
    FAIL();
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("line 42"), std::string::npos);
  }
}

TEST(NormalizeMentions, LongestThenEarliestWins) {
  std::vector<EntityMention> in = {
      {0, 4, "Tour", "u:tour"},
      {0, 15, "Tour de France", "u:tdf"},  // longest
      {9, 15, "France", "u:france"},
      {20, 25, "abcde", "u:a"},
      {22, 27, "cdefg", "u:b"},  // same length, later start
  };
  auto out = normalize_mentions(in);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].uri, "u:tdf");
  EXPECT_EQ(out[1].uri, "u:a");
}

TEST(CorpusReader, EmptyFileIsEmptyStream) {
  TempDir dir;
  write_file(dir / "c.jsonl", "");
  CorpusReader r(dir / "c.jsonl");
  EXPECT_FALSE(r.next());
  EXPECT_TRUE(r.diagnostics().empty());
}

TEST(CorpusReader, MissingFile) {
  TempDir dir;
  EXPECT_EQ(code_of([&] { CorpusReader r(dir / "nope.jsonl"); }),
            Errc::kFileNotFound);
}

TEST(CorpusReader, SkipPolicyRecordsDiagnostics) {
  TempDir dir;
  write_file(dir / "c.jsonl", doc_line("a", "2014-07-01") + "\n\n{bad\n" +
                                  doc_line("a", "2014-07-02") + "\n" +
                                  doc_line("b", "2014-07-03") + "\n");
  std::vector<Diagnostic> seen;
  CorpusReader r(dir / "c.jsonl", RejectPolicy::kSkip, std::nullopt,
                 [&](const Diagnostic &d) { seen.push_back(d); });
  std::vector<std::string> ids;
  while (auto d = r.next()) ids.push_back(d->doc_id);
  EXPECT_EQ(ids, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(r.diagnostics().size(), 2u);
  EXPECT_EQ(r.diagnostics()[0].line, 3u);
  EXPECT_EQ(r.diagnostics()[0].code, Errc::kMalformedRecord);
  EXPECT_EQ(r.diagnostics()[1].line, 4u);  // duplicate doc_id
  EXPECT_EQ(seen.size(), 2u);
}

TEST(CorpusReader, ThrowPolicyStopsAtFirstError) {
  TempDir dir;
  write_file(dir / "c.jsonl", doc_line("a", "2014-07-01") + "\n{bad\n");
  CorpusReader r(dir / "c.jsonl");
  EXPECT_TRUE(r.next());
  EXPECT_EQ(code_of([&] { r.next(); }), Errc::kMalformedRecord);
}

TEST(CorpusReader, Limit) {
  TempDir dir;
  write_file(dir / "c.jsonl", doc_line("a", "2014-07-01") + "\n" +
                                  doc_line("b", "2014-07-01") + "\n");
  EXPECT_EQ(load_corpus(dir / "c.jsonl", 1).size(), 1u);
}

TEST(Document, JsonRoundTrip) {
  Document d = parse_document(kNibali, 1);
  EXPECT_EQ(parse_document(to_json_line(d), 1), d);
}

TEST(SliceCorpus, PartitionsByMonth) {
  TempDir dir;
  std::vector<Document> docs = {parse_document(doc_line("a", "2014-07-15"), 1),
                                parse_document(doc_line("b", "2014-07-20"), 2),
                                parse_document(doc_line("c", "2014-08-02"), 3)};
  auto counts = slice_corpus(docs, Granularity::kMonth, dir / "out");
  EXPECT_EQ(counts, (std::map<std::string, std::size_t>{{"2014-07", 2},
                                                         {"2014-08", 1}}));
  auto files = list_slice_files(dir / "out");
  ASSERT_EQ(files.size(), 2u);
  auto jul = load_corpus(files.at("2014-07"));
  ASSERT_EQ(jul.size(), 2u);
  EXPECT_EQ(jul[0], docs[0]);
  EXPECT_EQ(jul[1], docs[1]);
}

TEST(SliceCorpus, EmptyInputGivesEmptyMap) {
  TempDir dir;
  EXPECT_TRUE(slice_corpus(std::vector<Document>{}, Granularity::kMonth,
                           dir / "out")
                  .empty());
}

TEST(SliceCorpus, SevenMonths) {
  TempDir dir;
  std::vector<Document> docs;
  const char *dates[] = {"2014-07-03", "2014-08-03", "2014-09-03", "2014-10-03",
                         "2014-11-03", "2014-12-03", "2015-01-03", "2014-07-30"};
  int i = 0;
  for (auto d : dates) {
    docs.push_back(parse_document(doc_line("d" + std::to_string(i++), d), 1));
  }
  auto counts = slice_corpus(docs, Granularity::kMonth, dir.path());
  EXPECT_EQ(counts.size(), 7u);
  EXPECT_EQ(counts.at("2014-07"), 2u);
  EXPECT_EQ(counts.begin()->first, "2014-07");
  EXPECT_EQ(counts.rbegin()->first, "2015-01");
}

TEST(SliceCorpus, UnwritableDirectory) {
  TempDir dir;
  write_file(dir / "file", "x");
  std::vector<Document> docs = {parse_document(doc_line("a", "2014-07-15"), 1)};
  EXPECT_EQ(code_of([&] {
              slice_corpus(docs, Granularity::kMonth, dir / "file" / "sub");
            }),
            Errc::kWriteFailure);
}

}  // namespace
}  // namespace tempent
