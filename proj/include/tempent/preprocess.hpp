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

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tempent/corpus.hpp"
#include "tempent/error.hpp"

namespace tempent {

// Prefix that marks entity-ID tokens. tokenize() never emits ':', so entity
// tokens and word tokens can never collide.
inline constexpr std::string_view kEntityPrefix = "E:";

struct TokenSequence {
  std::string doc_id;
  std::vector<std::string> tokens;

  friend bool operator==(const TokenSequence &, const TokenSequence &) = default;
};

namespace unicode {

inline constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one UTF-8 code point at `pos`, advancing it. Malformed input yields
// kInvalid and advances by one byte.
inline char32_t decode(std::string_view s, std::size_t &pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  int len = b0 < 0x80 ? 1 : (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3
                          : (b0 >> 3) == 0x1E ? 4 : 0;
  if (len == 0 || pos + len > s.size()) {
    ++pos;
    return kInvalid;
  }
  char32_t cp = len == 1 ? b0 : b0 & (0x7F >> len);
  for (int i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return kInvalid;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  pos += len;
  return cp;
}

inline void encode(char32_t cp, std::string &out) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Letters and digits. ASCII is exact; beyond ASCII, everything outside the
// common punctuation, symbol and space blocks counts as a word character.
inline bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
           (cp >= 'A' && cp <= 'Z');
  }
  if (cp == kInvalid) return false;
  if (cp <= 0xBF) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  if (cp >= 0xFE10 && cp <= 0xFE6F) return false;
  if ((cp >= 0xFF00 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) ||
      (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65)) {
    return false;
  }
  if (cp >= 0xFFF0 && cp <= 0xFFFF) return false;
  if (cp >= 0x1F000 && cp <= 0x1FAFF) return false;
  return true;
}

// Simple case folding for ASCII, Latin-1, Latin Extended-A, Greek and
// Cyrillic capitals.
inline char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp < 0xC0) return cp;
  if (cp <= 0xDE) return cp == 0xD7 ? cp : cp + 0x20;
  if (cp >= 0x100 && cp <= 0x17F) {
    if (cp == 0x130) return 'i';
    if (cp == 0x178) return 0xFF;
    const bool odd_upper =
        (cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E);
    if (odd_upper) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp == 0x138 || cp == 0x149 || cp == 0x17F) return cp;
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  return cp;
}

}  // namespace unicode

// Lowercases and splits on every character that is not a letter or digit.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp = unicode::decode(text, pos);
    if (unicode::is_word_char(cp)) {
      unicode::encode(unicode::to_lower(cp), current);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

inline std::string entity_token(std::string_view uri) {
  if (uri.empty()) throw Error(Errc::kEmptyUri, "entity URI is empty");
  std::string token(kEntityPrefix);
  token += uri;
  return token;
}

inline bool is_entity_token(std::string_view token) {
  return token.substr(0, kEntityPrefix.size()) == kEntityPrefix;
}

inline std::string percent_decode(std::string_view s) {
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      int hi = hex(s[i + 1]), lo = hex(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += s[i];
  }
  return out;
}

// Words naming an entity, derived from the last segment of its URI:
// percent-decoded, underscores as spaces, parenthesized text removed, then
// tokenized like document text.
inline std::vector<std::string> entity_label(std::string_view uri) {
  if (uri.empty()) throw Error(Errc::kEmptyUri, "entity URI is empty");
  std::string_view path = uri.substr(0, uri.find_first_of("?#"));
  while (!path.empty() && path.back() == '/') path.remove_suffix(1);
  std::string_view segment = path.substr(path.rfind('/') + 1);

  std::string decoded = percent_decode(segment);
  std::string stripped;
  int depth = 0;
  for (char c : decoded) {
    if (c == '(') {
      ++depth;
    } else if (c == ')' && depth > 0) {
      --depth;
    } else if (depth == 0) {
      stripped += (c == '_') ? ' ' : c;
    }
  }
  auto words = tokenize(stripped);
  if (words.empty()) {
    throw Error(Errc::kEmptyLabel,
                "no label words left for '" + std::string(uri) + "'");
  }
  return words;
}

// Tokens of one document. With entity_aware, each mention span becomes its
// entity-ID token and only the text between mentions is tokenized.
inline TokenSequence replace_mentions(const Document &doc, bool entity_aware) {
  TokenSequence seq{doc.doc_id, {}};
  if (!entity_aware) {
    seq.tokens = tokenize(doc.text);
    return seq;
  }
  std::string_view text(doc.text);
  std::size_t cursor = 0;
  auto emit_gap = [&](std::size_t until) {
    for (auto &t : tokenize(text.substr(cursor, until - cursor))) {
      seq.tokens.push_back(std::move(t));
    }
  };
  for (const auto &m : doc.mentions) {
    emit_gap(m.start);
    seq.tokens.push_back(entity_token(m.uri));
    cursor = m.end;
  }
  emit_gap(text.size());
  return seq;
}

inline std::vector<TokenSequence> preprocess_documents(
    const std::vector<Document> &docs, bool entity_aware) {
  std::vector<TokenSequence> out;
  out.reserve(docs.size());
  for (const auto &d : docs) out.push_back(replace_mentions(d, entity_aware));
  return out;
}

// Debug dump: one line per document, doc_id TAB space-joined tokens.
inline void write_token_dump(std::ostream &out,
                             const std::vector<TokenSequence> &sequences) {
  for (const auto &s : sequences) {
    out << s.doc_id << '\t';
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (i) out << ' ';
      out << s.tokens[i];
    }
    out << '\n';
  }
}

}  // namespace tempent
