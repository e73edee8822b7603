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

#include <stdexcept>
#include <string>
#include <string_view>

namespace tempent {

// Every failure the library reports carries one of these codes so callers
// (the CLI in particular) can map them onto exit statuses.
enum class Errc {
  kFileNotFound,
  kMalformedRecord,
  kOffsetMismatch,
  kInvalidTimestamp,
  kInvalidLabel,
  kWriteFailure,
  kEmptyUri,
  kEmptyLabel,
  kEmptyVocabulary,
  kEmptyCorpus,
  kInvalidArgument,
  kBadMagic,
  kUnsupportedVersion,
  kTruncatedFile,
  kChecksumMismatch,
  kDimensionMismatch,
  kMissingModel,
  kUnresolvableQuery,
  kUnknownQid,
  kDegenerateInput,
};

inline std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kFileNotFound: return "FileNotFound";
    case Errc::kMalformedRecord: return "MalformedRecord";
    case Errc::kOffsetMismatch: return "OffsetMismatch";
    case Errc::kInvalidTimestamp: return "InvalidTimestamp";
    case Errc::kInvalidLabel: return "InvalidLabel";
    case Errc::kWriteFailure: return "WriteFailure";
    case Errc::kEmptyUri: return "EmptyUri";
    case Errc::kEmptyLabel: return "EmptyLabel";
    case Errc::kEmptyVocabulary: return "EmptyVocabulary";
    case Errc::kEmptyCorpus: return "EmptyCorpus";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kBadMagic: return "BadMagic";
    case Errc::kUnsupportedVersion: return "UnsupportedVersion";
    case Errc::kTruncatedFile: return "TruncatedFile";
    case Errc::kChecksumMismatch: return "ChecksumMismatch";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kMissingModel: return "MissingModel";
    case Errc::kUnresolvableQuery: return "UnresolvableQuery";
    case Errc::kUnknownQid: return "UnknownQid";
    case Errc::kDegenerateInput: return "DegenerateInput";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string &message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace tempent
