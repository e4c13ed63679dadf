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

#include "tapestore/arc_file.h"

#include <algorithm>
#include <fstream>
#include <limits>

#include "tapestore/error.h"

namespace tapestore {

namespace {

bool IsValidMediaType(std::string_view s) {
  if (s.empty()) return false;
  for (const char c : s) {
    if (c <= 0x20 || c >= 0x7f) return false;  // printable ASCII, no spaces
  }
  return true;
}

std::string HeaderLine(std::string_view url, std::string_view ip,
                       UtcSeconds archived, std::string_view content_type,
                       std::uint64_t length) {
  std::string line;
  line.reserve(url.size() + 48);
  line += url;
  line += ' ';
  line += ip;
  line += ' ';
  line += FormatArcDate(archived);
  line += ' ';
  line += content_type;
  line += ' ';
  line += std::to_string(length);
  line += '\n';
  return line;
}

// Splits a header line (without the trailing newline) into exactly five
// single-space-separated fields.
bool SplitFields(std::string_view line, std::string_view out[5]) {
  std::size_t field = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ' ') {
      if (field == 5) return false;
      out[field++] = line.substr(start, i - start);
      start = i + 1;
    }
  }
  if (field != 5) return false;
  for (std::size_t i = 0; i < 5; ++i) {
    if (out[i].empty()) return false;
  }
  return true;
}

bool ParseLength(std::string_view s, std::uint64_t* out) {
  if (s.empty() || (s.size() > 1 && s[0] == '0')) return false;
  std::uint64_t v = 0;
  for (const char c : s) {
    if (c < '0' || c > '9') return false;
    if (v > (std::numeric_limits<std::uint64_t>::max() - (c - '0')) / 10) {
      return false;
    }
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  *out = v;
  return true;
}

ArcRecordHeader ParseHeaderLine(std::string_view line, std::uint64_t offset,
                                Errc errc) {
  std::string_view fields[5];
  if (!SplitFields(line, fields)) {
    throw Error(errc, "ARC header line must have exactly 5 fields", offset);
  }
  for (const char c : line) {
    if (static_cast<unsigned char>(c) < 0x21 && c != ' ') {
      throw Error(errc, "non-printable byte in ARC header line", offset);
    }
    if (static_cast<unsigned char>(c) >= 0x7f) {
      throw Error(errc, "ARC header line must be ASCII", offset);
    }
  }
  ArcRecordHeader header;
  header.url = std::string(fields[0]);
  header.ip = std::string(fields[1]);
  const auto archived = ParseArcDate(fields[2]);
  if (!archived) {
    throw Error(errc, "malformed archive date in ARC header", offset);
  }
  header.archived = *archived;
  header.content_type = std::string(fields[3]);
  if (!ParseLength(fields[4], &header.length)) {
    throw Error(errc, "malformed length field in ARC header", offset);
  }
  return header;
}

std::string VersionBlockData() {
  std::string data;
  data += kArcVersionLine;
  data += '\n';
  data += kArcFieldNamesLine;
  data += '\n';
  return data;
}

}  // namespace

ArcWriter ArcWriter::Create(const RepoUri& arc_id,
                            const std::filesystem::path& path,
                            UtcSeconds created) {
  std::error_code ec;
  if (std::filesystem::exists(path, ec) &&
      std::filesystem::file_size(path, ec) > 0) {
    throw Error(Errc::kWriteOnceViolation,
                "destination not empty: " + path.string());
  }
  auto out = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*out) {
    throw Error(Errc::kIoError, "cannot open " + path.string());
  }
  return ArcWriter(arc_id, std::move(out), path.filename().string(), created);
}

ArcWriter::ArcWriter(const RepoUri& arc_id, std::unique_ptr<std::ostream> sink,
                     std::string name, UtcSeconds created)
    : arc_id_(arc_id), sink_(std::move(sink)) {
  if (arc_id.cls() != UriClass::kArc) {
    throw Error(Errc::kInvalidClass, "ARC writer requires an arc identifier");
  }
  const std::string data = VersionBlockData();
  WriteRaw(HeaderLine("filedesc://" + name, kArcLocalIp, created, "text/plain",
                      data.size()));
  WriteRaw(data);
  WriteRaw("\n");
}

void ArcWriter::WriteRaw(std::string_view bytes) {
  sink_->write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!*sink_) {
    throw Error(Errc::kIoError, "write failed on ARC sink");
  }
  position_ += bytes.size();
}

ByteExtent ArcWriter::Append(const RepoUri& ds_id, std::string_view media_type,
                             std::span<const std::uint8_t> data,
                             UtcSeconds archived) {
  if (sealed_) {
    throw Error(Errc::kSealed, "ARC file already sealed");
  }
  if (ds_id.cls() != UriClass::kDatastream) {
    throw Error(Errc::kInvalidClass, "ARC records are keyed by datastream id");
  }
  if (!IsValidMediaType(media_type)) {
    throw Error(Errc::kInvalidMediaType,
                "media type must be non-empty printable ASCII without spaces");
  }
  const ByteExtent extent{position_, 0};
  const std::string header = HeaderLine(ds_id.ToString(), kArcLocalIp,
                                        archived, media_type, data.size());
  WriteRaw(header);
  if (!data.empty()) {
    sink_->write(reinterpret_cast<const char*>(data.data()),
                 static_cast<std::streamsize>(data.size()));
    if (!*sink_) {
      throw Error(Errc::kIoError, "write failed on ARC sink");
    }
    position_ += data.size();
  }
  WriteRaw("\n");
  ++record_count_;
  return ByteExtent{extent.offset, header.size() + data.size()};
}

ArcSummary ArcWriter::Seal() {
  if (sealed_) {
    throw Error(Errc::kSealed, "ARC file already sealed");
  }
  sink_->flush();
  if (!*sink_) {
    throw Error(Errc::kIoError, "flush failed on ARC sink");
  }
  sealed_ = true;
  return ArcSummary{arc_id_, record_count_, position_};
}

namespace {

// Reads one header line starting at `offset`; returns the line without the
// newline and leaves the stream after it.
std::string ReadHeaderLineAt(std::istream& in, std::uint64_t offset) {
  std::string line;
  while (true) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) {
      throw Error(Errc::kScanError, "truncated ARC header line", offset);
    }
    if (c == '\n') break;
    line.push_back(static_cast<char>(c));
    if (line.size() > 1 << 16) {
      throw Error(Errc::kScanError, "unterminated ARC header line", offset);
    }
  }
  return line;
}

}  // namespace

std::vector<std::pair<ArcRecordHeader, ByteExtent>> ScanArc(std::istream& in) {
  std::vector<std::pair<ArcRecordHeader, ByteExtent>> records;
  std::uint64_t offset = 0;
  while (true) {
    const int first = in.peek();
    if (first == std::char_traits<char>::eof()) break;
    const std::string line = ReadHeaderLineAt(in, offset);
    ArcRecordHeader header = ParseHeaderLine(line, offset, Errc::kScanError);
    if (records.empty()) {
      if (header.url.rfind("filedesc://", 0) != 0) {
        throw Error(Errc::kScanError, "missing filedesc version block", 0);
      }
    }
    // Skip over the opaque data block, then require the separator newline.
    std::uint64_t remaining = header.length;
    char buf[1 << 16];
    const bool is_version_block = records.empty();
    std::string version_head;
    while (remaining > 0) {
      const std::uint64_t want =
          remaining < sizeof(buf) ? remaining : sizeof(buf);
      in.read(buf, static_cast<std::streamsize>(want));
      const std::uint64_t got = static_cast<std::uint64_t>(in.gcount());
      if (got == 0) {
        throw Error(Errc::kScanError,
                    "file truncated inside data block (declared length " +
                        std::to_string(header.length) + ")",
                    offset);
      }
      if (is_version_block && version_head.size() <= kArcVersionLine.size()) {
        version_head.append(buf, static_cast<std::size_t>(got));
      }
      remaining -= got;
    }
    if (is_version_block) {
      const std::string expect = std::string(kArcVersionLine) + "\n";
      if (version_head.compare(0, std::min(version_head.size(), expect.size()),
                               expect.data(),
                               std::min(version_head.size(), expect.size())) !=
              0 ||
          version_head.size() < expect.size()) {
        throw Error(Errc::kScanError, "unexpected ARC version line", offset);
      }
    }
    in.clear();
    const int sep = in.get();
    if (sep == std::char_traits<char>::eof()) {
      throw Error(Errc::kScanError, "missing record separator at end of file",
                  offset);
    }
    if (sep != '\n') {
      throw Error(Errc::kScanError,
                  "declared length does not reach the record separator",
                  offset);
    }
    const std::uint64_t extent_length = line.size() + 1 + header.length;
    records.emplace_back(std::move(header),
                         ByteExtent{offset, extent_length});
    offset += extent_length + 1;
  }
  if (records.empty()) {
    throw Error(Errc::kScanError, "empty input: not an ARC file", 0);
  }
  return records;
}

std::vector<std::pair<ArcRecordHeader, ByteExtent>> ScanArc(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::kIoError, "cannot open " + path.string());
  }
  return ScanArc(in);
}

std::pair<ArcRecordHeader, std::vector<std::uint8_t>> ReadArcRecord(
    std::istream& in, const ByteExtent& extent) {
  in.clear();
  in.seekg(0, std::ios::end);
  const std::uint64_t size = static_cast<std::uint64_t>(in.tellg());
  if (extent.offset > size || extent.length > size - extent.offset) {
    throw Error(Errc::kOutOfBounds, "extent " + std::to_string(extent.offset) +
                                        "+" + std::to_string(extent.length) +
                                        " exceeds file size " +
                                        std::to_string(size));
  }
  in.seekg(static_cast<std::streamoff>(extent.offset));
  std::string bytes(extent.length, '\0');
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::uint64_t>(in.gcount()) != extent.length) {
    throw Error(Errc::kIoError, "short read", extent.offset);
  }
  const std::size_t newline = bytes.find('\n');
  if (newline == std::string::npos) {
    throw Error(Errc::kCorruptRecord, "no header line inside extent",
                extent.offset);
  }
  ArcRecordHeader header = ParseHeaderLine(
      std::string_view(bytes).substr(0, newline), extent.offset,
      Errc::kCorruptRecord);
  const std::uint64_t block_size = extent.length - newline - 1;
  if (header.length != block_size) {
    throw Error(Errc::kCorruptRecord,
                "declared length " + std::to_string(header.length) +
                    " does not match block size " + std::to_string(block_size),
                extent.offset);
  }
  std::vector<std::uint8_t> data(
      bytes.begin() + static_cast<std::ptrdiff_t>(newline) + 1, bytes.end());
  return {std::move(header), std::move(data)};
}

std::pair<ArcRecordHeader, std::vector<std::uint8_t>> ReadArcRecord(
    const std::filesystem::path& path, const ByteExtent& extent) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::kIoError, "cannot open " + path.string());
  }
  return ReadArcRecord(in, extent);
}

}  // namespace tapestore
