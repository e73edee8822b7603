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

#include <cstring>
#include <sstream>

#include "support/synthetic.hpp"
#include "support/tempdir.hpp"
#include "tempent/modelstore.hpp"

namespace tempent {
namespace {

using testing::read_file;
using testing::TempDir;
using testing::write_file;

Errc load_error(const std::filesystem::path &p) {
  try {
    load_model(p);
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "loaded " << p;
  return Errc::kInvalidArgument;
}

bool same_bits(const std::vector<float> &a, const std::vector<float> &b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

TEST(ModelStore, RoundTripIsBitIdentical) {
  TempDir dir;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto m = testing::random_model(seed);
    auto path = dir / model_filename("2014-07", m.entity_aware).string();
    save_model(m, path);
    auto back = load_model(path);
    EXPECT_EQ(back.vocab, m.vocab);
    EXPECT_EQ(back.entity_aware, m.entity_aware);
    EXPECT_EQ(back.dim, m.dim);
    EXPECT_EQ(back.slice_label, "2014-07");
    EXPECT_TRUE(same_bits(back.input, m.input));
    EXPECT_TRUE(same_bits(back.output, m.output));
    EXPECT_TRUE(std::signbit(back.input[0]));
  }
}

TEST(ModelStore, FileSizeFollowsFormat) {
  TempDir dir;
  std::vector<VocabEntry> e;
  std::uint64_t token_bytes = 0;
  for (int i = 0; i < 1000; ++i) {
    e.push_back({"w" + std::to_string(i), 5, false});
    token_bytes += e.back().token.size();
  }
  EmbeddingModel m;
  m.dim = 300;
  m.vocab = Vocabulary::from_entries(e, 5);
  m.input.assign(1000 * 300, 0.5f);
  m.output.assign(1000 * 300, -0.5f);
  save_model(m, dir / "2014-07.temb");
  const std::uint64_t header = 4 + 4 + 1 + 4 + 8;
  const std::uint64_t vocab_block = 1000 * (4 + 8 + 1) + token_bytes;
  const std::uint64_t matrices = 2ull * 1000 * 300 * 4;
  EXPECT_EQ(std::filesystem::file_size(dir / "2014-07.temb"),
            header + vocab_block + matrices + 8);
}

TEST(ModelStore, HeaderLayout) {
  TempDir dir;
  auto m = testing::random_model(3);
  save_model(m, dir / "x.temb");
  const std::string bytes = read_file(dir / "x.temb");
  EXPECT_EQ(bytes.substr(0, 4), "TEMB");
  std::uint32_t version, dim;
  std::uint64_t n;
  std::memcpy(&version, bytes.data() + 4, 4);
  std::memcpy(&dim, bytes.data() + 9, 4);
  std::memcpy(&n, bytes.data() + 13, 8);
  EXPECT_EQ(version, 1u);
  EXPECT_EQ(static_cast<bool>(bytes[8]), m.entity_aware);
  EXPECT_EQ(dim, m.dim);
  EXPECT_EQ(n, m.vocab.size());
  // Trailer: FNV-1a 64 over everything before it.
  std::uint64_t h = 0xcbf29ce484222325ull, stored;
  for (std::size_t i = 0; i + 8 < bytes.size(); ++i) {
    h = (h ^ static_cast<unsigned char>(bytes[i])) * 0x100000001b3ull;
  }
  std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
  EXPECT_EQ(stored, h);
}

TEST(ModelStore, Corruption) {
  TempDir dir;
  save_model(testing::random_model(4), dir / "ok.temb");
  const std::string good = read_file(dir / "ok.temb");

  std::string bad = good;
  bad.replace(0, 4, "XXXX");
  write_file(dir / "magic.temb", bad);
  EXPECT_EQ(load_error(dir / "magic.temb"), Errc::kBadMagic);

  bad = good;
  bad[4] = 2;
  write_file(dir / "version.temb", bad);
  EXPECT_EQ(load_error(dir / "version.temb"), Errc::kUnsupportedVersion);

  write_file(dir / "short.temb", good.substr(0, good.size() - 20));
  EXPECT_EQ(load_error(dir / "short.temb"), Errc::kTruncatedFile);
  write_file(dir / "header.temb", good.substr(0, 10));
  EXPECT_EQ(load_error(dir / "header.temb"), Errc::kTruncatedFile);
  write_file(dir / "long.temb", good + "x");
  EXPECT_EQ(load_error(dir / "long.temb"), Errc::kTruncatedFile);

  bad = good;
  bad[bad.size() - 12] ^= 0x40;
  write_file(dir / "flip.temb", bad);
  EXPECT_EQ(load_error(dir / "flip.temb"), Errc::kChecksumMismatch);

  EXPECT_EQ(load_error(dir / "missing.temb"), Errc::kFileNotFound);
}

TEST(ModelStore, UnwritablePath) {
  TempDir dir;
  write_file(dir / "plain", "x");
  try {
    save_model(testing::random_model(1), dir / "plain" / "m.temb");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), Errc::kWriteFailure);
  }
}

TEST(ModelRegistry, ScansDirectory) {
  TempDir dir;
  for (const char *label : {"2014-07", "2014-08", "2014-09", "2014-10",
                            "2014-11", "2014-12", "2015-01"}) {
    auto m = testing::random_model(7, label);
    m.entity_aware = true;
    save_model(m, dir / model_filename(label, true).string());
  }
  auto agnostic = testing::random_model(8);
  agnostic.entity_aware = false;
  save_model(agnostic, dir / model_filename("2014-07", false).string());
  write_file(dir / "2014-08.agnostic.temb", "garbage");
  write_file(dir / "notes.txt", "ignored");

  std::ostringstream warnings;
  auto reg = ModelRegistry::open(dir.path(), &warnings);
  EXPECT_EQ(reg.size(), 8u);
  EXPECT_NE(warnings.str().find("2014-08.agnostic.temb"), std::string::npos);
  EXPECT_NE(reg.get("2014-07", true), nullptr);
  EXPECT_NE(reg.get("2014-07", false), nullptr);
  EXPECT_EQ(reg.get("2014-08", false), nullptr);
  EXPECT_EQ(reg.get("2013-01", true), nullptr);
  EXPECT_EQ(reg.get("2014-07", true), reg.get("2014-07", true));
  auto view = reg.view(true);
  EXPECT_EQ(view.find("2015-01")->slice_label, "2015-01");
}

TEST(ModelRegistry, EmptyDirectory) {
  TempDir dir;
  EXPECT_EQ(ModelRegistry::open(dir.path()).size(), 0u);
  EXPECT_THROW(ModelRegistry::open(dir / "none"), Error);
}

}  // namespace
}  // namespace tempent
