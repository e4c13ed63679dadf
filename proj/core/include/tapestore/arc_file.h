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

#ifndef TAPESTORE_ARC_FILE_H_
#define TAPESTORE_ARC_FILE_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tapestore/byte_extent.h"
#include "tapestore/identifier.h"
#include "tapestore/timeutil.h"

namespace tapestore {

// Internet Archive ARC v1 container holding constituent datastreams, one
// record per datastream.
//
// Layout (all header text is ASCII):
//
//   record 0 (version block):
//     filedesc://<name> <ip> <date14> text/plain <len>\n
//     1 0 XMLtapeARC\n
//     URL IP-address Archive-date Content-type Archive-length\n
//   each data record:
//     <url> <ip> <date14> <content-type> <length>\n
//     <length raw bytes>
//
// Every record (version block included) is followed by exactly one newline
// separator. A record's byte extent covers its header line through its data
// block, excluding the separator. Data blocks are opaque; extents, not
// delimiters, are authoritative.

inline constexpr std::string_view kArcVersionLine = "1 0 XMLtapeARC";
inline constexpr std::string_view kArcFieldNamesLine =
    "URL IP-address Archive-date Content-type Archive-length";

// Acquisition host for locally ingested content; nothing was crawled.
inline constexpr std::string_view kArcLocalIp = "0.0.0.0";

struct ArcRecordHeader {
  std::string url;           // filedesc://<name> for record 0, else the
                             // datastream identifier
  std::string ip;
  UtcSeconds archived = 0;   // parsed 14-digit archive date
  std::string content_type;
  std::uint64_t length = 0;  // declared size of the data block
};

struct ArcSummary {
  RepoUri arc_id;
  std::uint64_t record_count = 0;  // data records, version block excluded
  std::uint64_t total_bytes = 0;
};

// Exclusive writer for one ARC file, valid until Seal(). The version block
// is written on construction.
class ArcWriter {
 public:
  // Opens `path` for writing under write-once discipline: an existing
  // non-empty destination is refused.
  static ArcWriter Create(const RepoUri& arc_id,
                          const std::filesystem::path& path,
                          UtcSeconds created);

  // Writes to an arbitrary sink, which must be empty. `name` becomes the
  // filedesc:// token of the version block.
  ArcWriter(const RepoUri& arc_id, std::unique_ptr<std::ostream> sink,
            std::string name, UtcSeconds created);

  ArcWriter(ArcWriter&&) = default;
  ArcWriter& operator=(ArcWriter&&) = default;

  // Appends one record and returns its extent. The declared length always
  // equals data.size(); zero-length datastreams are legal.
  ByteExtent Append(const RepoUri& ds_id, std::string_view media_type,
                    std::span<const std::uint8_t> data, UtcSeconds archived);

  ArcSummary Seal();

  const RepoUri& arc_id() const { return arc_id_; }
  std::uint64_t bytes_written() const { return position_; }
  std::uint64_t record_count() const { return record_count_; }
  bool sealed() const { return sealed_; }

 private:
  void WriteRaw(std::string_view bytes);

  RepoUri arc_id_;
  std::unique_ptr<std::ostream> sink_;
  std::uint64_t position_ = 0;
  std::uint64_t record_count_ = 0;
  bool sealed_ = false;
};

// Sequential scan of a complete ARC file. Yields every record including the
// version block, in file order, with byte-accurate extents, and validates
// each declared length against the actual block size. This is the
// independent recovery path for rebuilding indexes.
std::vector<std::pair<ArcRecordHeader, ByteExtent>> ScanArc(std::istream& in);
std::vector<std::pair<ArcRecordHeader, ByteExtent>> ScanArc(
    const std::filesystem::path& path);

// Random access to one record. Verifies the declared length against the
// extent before returning the data block.
std::pair<ArcRecordHeader, std::vector<std::uint8_t>> ReadArcRecord(
    std::istream& in, const ByteExtent& extent);
std::pair<ArcRecordHeader, std::vector<std::uint8_t>> ReadArcRecord(
    const std::filesystem::path& path, const ByteExtent& extent);

}  // namespace tapestore

#endif  // TAPESTORE_ARC_FILE_H_
