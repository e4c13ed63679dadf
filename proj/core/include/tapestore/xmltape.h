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

#ifndef TAPESTORE_XMLTAPE_H_
#define TAPESTORE_XMLTAPE_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tapestore/byte_extent.h"
#include "tapestore/identifier.h"
#include "tapestore/timeutil.h"

namespace tapestore {

// An XMLtape is a single valid XML document concatenating many record
// payloads: a tape-level administrative section followed by records, each
// carrying the two strictly defined admin elements (identifier and creation
// datetime). Payloads may be from any XML namespace and are stored verbatim.
//
// Serialization is normative so that independently written tapes
// interoperate: UTF-8 without BOM, the vocabulary prefix is `t` bound to
// urn:xmltape:1.0 and re-declared on every tapeRecord so that indexed byte
// extents parse standalone, inter-record whitespace is exactly one newline,
// and payloads are never re-serialized. See docs/formats.md.

inline constexpr std::string_view kTapeNsUri = "urn:xmltape:1.0";

struct TapeAdmin {
  RepoUri tape_id;
  std::vector<RepoUri> arc_ids;  // exactly the ARC files this tape references
  std::vector<std::pair<std::string, std::string>> provenance;
};

struct TapeRecordAdmin {
  std::string record_id;   // unique within the tape; the OAI-PMH identifier
  UtcSeconds created = 0;  // seconds precision, rendered YYYY-MM-DDThh:mm:ssZ
  std::vector<std::pair<std::string, std::string>> props;
};

struct TapeRecord {
  TapeRecordAdmin admin;
  std::string payload;  // one namespace-qualified element, verbatim bytes
};

struct TapeSummary {
  RepoUri tape_id;
  std::uint64_t record_count = 0;
  std::uint64_t total_bytes = 0;
};

// Exclusive writer for one tape, valid until Seal(). Captures exact byte
// extents at write time; parsers that cannot report byte positions are never
// needed on the write path.
class TapeWriter {
 public:
  static TapeWriter Create(const TapeAdmin& admin,
                           const std::filesystem::path& path);
  TapeWriter(const TapeAdmin& admin, std::unique_ptr<std::ostream> sink);

  TapeWriter(TapeWriter&&) = default;
  TapeWriter& operator=(TapeWriter&&) = default;

  // Appends one record container. The payload must parse as a well-formed
  // standalone element (which makes it namespace-self-contained) and the
  // record identifier must be new to this tape. The returned extent covers
  // the container's first '<' through the last byte of its end tag.
  ByteExtent Append(const TapeRecord& record);

  TapeSummary Seal();

  const RepoUri& tape_id() const { return admin_.tape_id; }
  std::uint64_t bytes_written() const { return position_; }
  std::uint64_t record_count() const { return record_count_; }

 private:
  void WriteRaw(std::string_view bytes);

  TapeAdmin admin_;
  std::unique_ptr<std::ostream> sink_;
  std::unordered_set<std::string> seen_ids_;
  std::uint64_t position_ = 0;
  std::uint64_t record_count_ = 0;
  bool sealed_ = false;
};

struct TapeScan {
  TapeAdmin admin;
  std::vector<std::pair<TapeRecordAdmin, ByteExtent>> records;
};

// Streaming tokenization over the raw encoded bytes, yielding every record's
// admin and byte-accurate extent in file order. Never goes through an
// offset-unaware tree parse; this is the byte-level rescan that indexes can
// always be rebuilt from.
TapeScan ScanTape(std::istream& in);
TapeScan ScanTape(const std::filesystem::path& path);

// Slices exactly `extent` bytes and reparses them standalone. Throws
// Errc::kCorruptExtent when the slice is not a well-formed record container.
TapeRecord ReadRecordAt(std::istream& in, const ByteExtent& extent);
TapeRecord ReadRecordAt(const std::filesystem::path& path,
                        const ByteExtent& extent);

// Parses an already-sliced record container.
TapeRecord ParseRecordSlice(std::string_view bytes);

struct ValidationFinding {
  std::string code;     // e.g. "not-well-formed", "missing-admin-element"
  std::string detail;
  std::optional<std::uint64_t> record_ordinal;
  std::optional<std::uint64_t> byte_offset;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;
  std::uint64_t scan_record_count = 0;
  std::uint64_t full_parse_record_count = 0;
  bool ok() const { return findings.empty(); }
};

// Validates a sealed tape: well-formedness via an independent full parse
// (not the scanner), structural conformance to the tape vocabulary,
// record-id uniqueness, datetime format, and agreement between the scan
// extents and the full-parse census. Failures are findings, not errors.
ValidationReport ValidateTape(const std::filesystem::path& path);

}  // namespace tapestore

#endif  // TAPESTORE_XMLTAPE_H_
