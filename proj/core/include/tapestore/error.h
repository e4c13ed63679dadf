// Copyright 2026 The tapestore authors
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

#ifndef TAPESTORE_ERROR_H_
#define TAPESTORE_ERROR_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tapestore {

// Failure categories surfaced by the storage engine. Tests and the CLI
// dispatch on these instead of matching message text.
enum class Errc {
  kInvalidClass,
  kMalformedIdentifier,
  kWriteOnceViolation,
  kSealed,
  kInvalidMediaType,
  kScanError,
  kDuplicateKey,
  kCorruptRecord,
  kOutOfBounds,
  kPayloadError,
  kCorruptExtent,
  kInvalidRange,
  kNotFound,
  kConflict,
  kInvalidBase,
  kInvalidArgument,
  kStaleIndex,
  kIoError,
};

inline std::string_view ErrcName(Errc code) {
  switch (code) {
    case Errc::kInvalidClass: return "invalid-class";
    case Errc::kMalformedIdentifier: return "malformed-identifier";
    case Errc::kWriteOnceViolation: return "write-once-violation";
    case Errc::kSealed: return "sealed";
    case Errc::kInvalidMediaType: return "invalid-media-type";
    case Errc::kScanError: return "scan-error";
    case Errc::kDuplicateKey: return "duplicate-key";
    case Errc::kCorruptRecord: return "corrupt-record";
    case Errc::kOutOfBounds: return "out-of-bounds";
    case Errc::kPayloadError: return "payload-error";
    case Errc::kCorruptExtent: return "corrupt-extent";
    case Errc::kInvalidRange: return "invalid-range";
    case Errc::kNotFound: return "not-found";
    case Errc::kConflict: return "conflict";
    case Errc::kInvalidBase: return "invalid-base";
    case Errc::kInvalidArgument: return "invalid-argument";
    case Errc::kStaleIndex: return "stale-index";
    case Errc::kIoError: return "io-error";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(ErrcName(code)) + ": " + message),
        code_(code) {}
  Error(Errc code, const std::string& message, std::uint64_t byte_offset)
      : std::runtime_error(std::string(ErrcName(code)) + ": " + message +
                           " (at byte " + std::to_string(byte_offset) + ")"),
        code_(code),
        byte_offset_(byte_offset) {}

  Errc code() const { return code_; }

  // Byte position in the file or input string, where known.
  std::optional<std::uint64_t> byte_offset() const { return byte_offset_; }

 private:
  Errc code_;
  std::optional<std::uint64_t> byte_offset_;
};

}  // namespace tapestore

#endif  // TAPESTORE_ERROR_H_
