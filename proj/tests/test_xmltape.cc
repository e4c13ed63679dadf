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

#include "tapestore/xmltape.h"

#include <doctest.h>

#include <cstring>
#include <random>
#include <sstream>

#include "support/generators.h"
#include "support/temp_dir.h"
#include "support/xml_oracle.h"
#include "tapestore/error.h"
#include "tapestore/hash.h"

using namespace tapestore;
using test_support::TempDir;

namespace {

constexpr UtcSeconds kT0 = 1754827200;  // 2025-08-10T12:00:00Z

TapeAdmin NewAdmin(std::size_t arc_count = 0) {
  TapeAdmin admin{RepoUri::Mint(UriClass::kTape), {}, {}};
  for (std::size_t i = 0; i < arc_count; ++i) {
    admin.arc_ids.push_back(RepoUri::Mint(UriClass::kArc));
  }
  admin.provenance.emplace_back("software", "tapestore/test");
  return admin;
}

TapeRecord NewRecord(std::size_t i, std::string payload = "") {
  TapeRecord record;
  record.admin.record_id = RepoUri::Mint(UriClass::kPackage).ToString();
  record.admin.created = kT0 + static_cast<UtcSeconds>(i);
  if (payload.empty()) {
    payload = "<p:doc xmlns:p=\"urn:example:p\" n=\"" + std::to_string(i) +
              "\">payload " + std::to_string(i) + "</p:doc>";
  }
  record.payload = std::move(payload);
  return record;
}

struct MemoryTape {
  explicit MemoryTape(TapeAdmin admin = NewAdmin())
      : buffer(new std::ostringstream()),
        writer(admin, std::unique_ptr<std::ostream>(buffer)) {}

  std::string bytes() const { return buffer->str(); }

  std::ostringstream* buffer;  // owned by writer
  TapeWriter writer;
};

}  // namespace

TEST_CASE("an empty sealed tape is a well-formed xml document") {
  const TapeAdmin admin = NewAdmin(2);
  MemoryTape tape{admin};
  const TapeSummary summary = tape.writer.Seal();
  CHECK(summary.record_count == 0);

  const std::string bytes = tape.bytes();
  CHECK(test_support::OracleWellFormed(bytes));
  CHECK(test_support::OracleCountRootChildren(bytes, "urn:xmltape:1.0",
                                              "tapeRecord") == 0);

  std::istringstream in(bytes);
  const TapeScan scan = ScanTape(in);
  CHECK(scan.records.empty());
  CHECK(scan.admin.tape_id == admin.tape_id);
  REQUIRE(scan.admin.arc_ids.size() == 2);
  CHECK(scan.admin.arc_ids[0] == admin.arc_ids[0]);
  CHECK(scan.admin.arc_ids[1] == admin.arc_ids[1]);
  CHECK(scan.admin.provenance == admin.provenance);
}

TEST_CASE("the first record starts exactly after the serialized head") {
  MemoryTape tape;
  const std::uint64_t head = tape.writer.bytes_written();
  const ByteExtent extent = tape.writer.Append(NewRecord(0));
  tape.writer.Seal();
  CHECK(extent.offset == head);

  std::istringstream in(tape.bytes());
  const TapeScan scan = ScanTape(in);
  REQUIRE(scan.records.size() == 1);
  CHECK(scan.records[0].second == extent);
}

TEST_CASE("extent bytes reparse standalone to the appended record") {
  MemoryTape tape;
  std::vector<std::pair<TapeRecord, ByteExtent>> written;
  for (std::size_t i = 0; i < 20; ++i) {
    TapeRecord record = NewRecord(i);
    record.admin.props.emplace_back("seq", std::to_string(i));
    const ByteExtent extent = tape.writer.Append(record);
    written.emplace_back(std::move(record), extent);
  }
  tape.writer.Seal();
  const std::string bytes = tape.bytes();

  for (const auto& [record, extent] : written) {
    const std::string slice = bytes.substr(extent.offset, extent.length);
    const TapeRecord parsed = ParseRecordSlice(slice);
    CHECK(parsed.admin.record_id == record.admin.record_id);
    CHECK(parsed.admin.created == record.admin.created);
    CHECK(parsed.admin.props == record.admin.props);
    CHECK(parsed.payload == record.payload);  // byte-identical
  }
}

TEST_CASE("successive extents are contiguous up to one newline") {
  MemoryTape tape;
  const ByteExtent a = tape.writer.Append(NewRecord(0));
  const ByteExtent b = tape.writer.Append(NewRecord(1));
  tape.writer.Seal();
  CHECK(b.offset == a.offset + a.length + 1);
}

TEST_CASE("duplicate record identifiers are rejected") {
  MemoryTape tape;
  TapeRecord record = NewRecord(0);
  tape.writer.Append(record);
  record.payload = "<p:x xmlns:p=\"urn:p\"/>";
  try {
    tape.writer.Append(record);
    FAIL("expected duplicate key");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kDuplicateKey);
  }
}

TEST_CASE("payload must be a namespace-qualified standalone element") {
  MemoryTape tape;
  TapeRecord record = NewRecord(0);

  SUBCASE("prefix declared inside the payload is self-contained") {
    record.payload = "<q:doc xmlns:q=\"urn:q\"><q:inner/></q:doc>";
    CHECK_NOTHROW(tape.writer.Append(record));
  }

  SUBCASE("malformed payload") {
    record.payload = "<broken";
    try {
      tape.writer.Append(record);
      FAIL("expected payload error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kPayloadError);
    }
  }

  SUBCASE("undeclared prefix") {
    record.payload = "<q:doc>x</q:doc>";
    CHECK_THROWS_AS(tape.writer.Append(record), Error);
  }

  SUBCASE("unqualified root") {
    record.payload = "<doc>x</doc>";
    try {
      tape.writer.Append(record);
      FAIL("expected payload error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kPayloadError);
    }
  }

  SUBCASE("trailing junk") {
    record.payload = "<q:doc xmlns:q=\"urn:q\"/>\n";
    CHECK_THROWS_AS(tape.writer.Append(record), Error);
  }
}

TEST_CASE("sealing") {
  MemoryTape tape;
  for (std::size_t i = 0; i < 5; ++i) tape.writer.Append(NewRecord(i));
  const TapeSummary summary = tape.writer.Seal();
  CHECK(summary.record_count == 5);
  CHECK(summary.total_bytes == tape.bytes().size());
  CHECK_THROWS_AS(tape.writer.Append(NewRecord(9)), Error);
  CHECK_THROWS_AS(tape.writer.Seal(), Error);

  CHECK(test_support::OracleCountRootChildren(
            tape.bytes(), "urn:xmltape:1.0", "tapeRecord") == 5);
}

TEST_CASE("full-document parse succeeds for tapes of various sizes") {
  for (const std::size_t n : {std::size_t{0}, std::size_t{1},
                              std::size_t{1000}}) {
    MemoryTape tape;
    for (std::size_t i = 0; i < n; ++i) tape.writer.Append(NewRecord(i));
    tape.writer.Seal();
    CHECK(test_support::OracleWellFormed(tape.bytes()));
    CHECK(test_support::OracleCountRootChildren(
              tape.bytes(), "urn:xmltape:1.0", "tapeRecord") == n);
  }
}

TEST_CASE("scan extents equal write-time extents for a generated tape") {
  MemoryTape tape;
  std::vector<std::pair<std::string, ByteExtent>> written;
  for (std::size_t i = 0; i < 1000; ++i) {
    TapeRecord record = NewRecord(i);
    const ByteExtent extent = tape.writer.Append(record);
    written.emplace_back(record.admin.record_id, extent);
  }
  tape.writer.Seal();

  std::istringstream in(tape.bytes());
  const TapeScan scan = ScanTape(in);
  REQUIRE(scan.records.size() == written.size());
  for (std::size_t i = 0; i < written.size(); ++i) {
    CHECK(scan.records[i].first.record_id == written[i].first);
    CHECK(scan.records[i].second == written[i].second);
  }
}

TEST_CASE("adversarial payloads cannot break extents") {
  MemoryTape tape;
  std::vector<std::pair<TapeRecord, ByteExtent>> written;

  // CDATA containing the record container's own end-tag text.
  TapeRecord cdata = NewRecord(0);
  cdata.payload =
      "<q:doc xmlns:q=\"urn:q\"><![CDATA[</t:tapeRecord></t:record> "
      "<t:tapeRecord>]]></q:doc>";
  written.emplace_back(cdata, tape.writer.Append(cdata));

  // Escaped end-tag text in character data.
  TapeRecord escaped = NewRecord(1);
  escaped.payload =
      "<q:doc xmlns:q=\"urn:q\">&lt;/t:tapeRecord&gt; &lt;/t:tape&gt;</q:doc>";
  written.emplace_back(escaped, tape.writer.Append(escaped));

  // Deeply nested namespace redeclarations.
  std::string deep_open, deep_close;
  for (int i = 0; i < 64; ++i) {
    deep_open += "<n:e xmlns:n=\"urn:level:" + std::to_string(i) + "\">";
    deep_close += "</n:e>";
  }
  TapeRecord deep = NewRecord(2);
  deep.payload = "<q:doc xmlns:q=\"urn:q\">" + deep_open + "x" + deep_close +
                 "</q:doc>";
  written.emplace_back(deep, tape.writer.Append(deep));

  // A comment containing fake end tags.
  TapeRecord comment = NewRecord(3);
  comment.payload =
      "<q:doc xmlns:q=\"urn:q\"><!-- </t:tapeRecord> --></q:doc>";
  written.emplace_back(comment, tape.writer.Append(comment));

  tape.writer.Seal();
  const std::string bytes = tape.bytes();
  CHECK(test_support::OracleWellFormed(bytes));

  std::istringstream in(bytes);
  const TapeScan scan = ScanTape(in);
  REQUIRE(scan.records.size() == written.size());
  for (std::size_t i = 0; i < written.size(); ++i) {
    CHECK(scan.records[i].second == written[i].second);
    const TapeRecord parsed = ParseRecordSlice(
        bytes.substr(written[i].second.offset, written[i].second.length));
    CHECK(parsed.payload == written[i].first.payload);
  }
}

TEST_CASE("write/scan agreement holds over generated payload shapes") {
  // Property: whatever payload tree goes in, the write-time extents, the
  // rescan extents and the standalone reparses of the slices agree, and
  // the whole file stays acceptable to an independent parser.
  std::mt19937_64 rng(97);
  for (int round = 0; round < 20; ++round) {
    MemoryTape tape;
    std::vector<std::pair<TapeRecord, ByteExtent>> written;
    const std::size_t count = 1 + rng() % 40;
    for (std::size_t i = 0; i < count; ++i) {
      TapeRecord record = NewRecord(i, test_support::RandomPayload(rng));
      if (rng() % 3 == 0) {
        record.admin.props.emplace_back(test_support::RandomToken(rng, 5),
                                        "v\t\"<&>\n" +
                                            test_support::RandomToken(rng, 5));
      }
      const ByteExtent extent = tape.writer.Append(record);
      written.emplace_back(std::move(record), extent);
    }
    tape.writer.Seal();
    const std::string bytes = tape.bytes();

    REQUIRE(test_support::OracleWellFormed(bytes));
    std::istringstream in(bytes);
    const TapeScan scan = ScanTape(in);
    REQUIRE(scan.records.size() == written.size());
    for (std::size_t i = 0; i < written.size(); ++i) {
      CHECK(scan.records[i].second == written[i].second);
      CHECK(scan.records[i].first.record_id ==
            written[i].first.admin.record_id);
      CHECK(scan.records[i].first.props == written[i].first.admin.props);
      const TapeRecord parsed = ParseRecordSlice(bytes.substr(
          written[i].second.offset, written[i].second.length));
      CHECK(parsed.payload == written[i].first.payload);
    }
  }
}

TEST_CASE("the scanner is total under random byte mutations") {
  // Corrupted tapes must produce scan errors, never crashes or hangs.
  MemoryTape tape;
  for (std::size_t i = 0; i < 12; ++i) {
    std::mt19937_64 payload_rng(i);
    tape.writer.Append(NewRecord(i, test_support::RandomPayload(payload_rng)));
  }
  tape.writer.Seal();
  const std::string original = tape.bytes();

  std::mt19937_64 rng(98);
  std::size_t still_valid = 0;
  for (int round = 0; round < 400; ++round) {
    std::string mutated = original;
    const int flips = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < flips; ++i) {
      mutated[rng() % mutated.size()] =
          static_cast<char>(rng() % 256);
    }
    try {
      std::istringstream in(mutated);
      const TapeScan scan = ScanTape(in);
      ++still_valid;  // mutation landed somewhere structurally harmless
      CHECK(scan.records.size() <= 12);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kScanError);
    }
  }
  // Most random mutations must be caught; a few hit free text legally.
  CHECK(still_valid < 200);
}

TEST_CASE("read_record_at detects perturbed extents") {
  TempDir dir;
  const auto path = dir / "t.xmltape";
  std::vector<ByteExtent> extents;
  {
    TapeWriter writer = TapeWriter::Create(NewAdmin(), path);
    for (std::size_t i = 0; i < 10; ++i) {
      extents.push_back(writer.Append(NewRecord(i)));
    }
    writer.Seal();
  }

  for (const ByteExtent& extent : extents) {
    CHECK_NOTHROW(ReadRecordAt(path, extent));
    for (const ByteExtent bad :
         {ByteExtent{extent.offset - 1, extent.length},
          ByteExtent{extent.offset + 1, extent.length},
          ByteExtent{extent.offset, extent.length - 1},
          ByteExtent{extent.offset, extent.length + 1}}) {
      try {
        ReadRecordAt(path, bad);
        FAIL("expected corrupt extent at offset ", bad.offset);
      } catch (const Error& e) {
        CHECK(e.code() == Errc::kCorruptExtent);
      }
    }
  }

  const std::uint64_t size = std::filesystem::file_size(path);
  try {
    ReadRecordAt(path, ByteExtent{size + 1, 10});
    FAIL("expected out of bounds");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kOutOfBounds);
  }
}

namespace {

// In-memory stream that accounts for every byte handed out, so tests can
// prove a read touched nothing beyond its extent.
class CountingBuf : public std::streambuf {
 public:
  explicit CountingBuf(const std::string& data) : data_(data) {}

  std::size_t bytes_read() const { return bytes_read_; }
  std::size_t seeks() const { return seeks_; }

 protected:
  int_type underflow() override {
    if (pos_ >= data_.size()) return traits_type::eof();
    return traits_type::to_int_type(data_[pos_]);
  }

  int_type uflow() override {
    if (pos_ >= data_.size()) return traits_type::eof();
    ++bytes_read_;
    return traits_type::to_int_type(data_[pos_++]);
  }

  std::streamsize xsgetn(char* out, std::streamsize want) override {
    const std::streamsize got = std::min<std::streamsize>(
        want, static_cast<std::streamsize>(data_.size() - pos_));
    std::memcpy(out, data_.data() + pos_, static_cast<std::size_t>(got));
    pos_ += static_cast<std::size_t>(got);
    bytes_read_ += static_cast<std::size_t>(got);
    return got;
  }

  pos_type seekoff(off_type off, std::ios_base::seekdir dir,
                   std::ios_base::openmode) override {
    ++seeks_;
    if (dir == std::ios_base::beg) {
      pos_ = static_cast<std::size_t>(off);
    } else if (dir == std::ios_base::cur) {
      pos_ = static_cast<std::size_t>(static_cast<off_type>(pos_) + off);
    } else {
      pos_ = static_cast<std::size_t>(
          static_cast<off_type>(data_.size()) + off);
    }
    return static_cast<pos_type>(pos_);
  }

  pos_type seekpos(pos_type pos, std::ios_base::openmode mode) override {
    return seekoff(static_cast<off_type>(pos), std::ios_base::beg, mode);
  }

 private:
  const std::string& data_;
  std::size_t pos_ = 0;
  std::size_t bytes_read_ = 0;
  std::size_t seeks_ = 0;
};

}  // namespace

TEST_CASE("indexed reads touch only the extent bytes") {
  MemoryTape tape;
  std::vector<ByteExtent> extents;
  for (std::size_t i = 0; i < 200; ++i) {
    extents.push_back(tape.writer.Append(NewRecord(i)));
  }
  tape.writer.Seal();
  const std::string bytes = tape.bytes();

  // Reading a late record costs its extent, not the bytes before it.
  const ByteExtent& late = extents[180];
  CountingBuf buf(bytes);
  std::istream in(&buf);
  const TapeRecord record = ReadRecordAt(in, late);
  CHECK(record.admin.record_id.size() > 0);
  CHECK(buf.bytes_read() == late.length);
}

TEST_CASE("sealed tapes are immutable under reads") {
  TempDir dir;
  const auto path = dir / "t.xmltape";
  std::vector<ByteExtent> extents;
  {
    TapeWriter writer = TapeWriter::Create(NewAdmin(), path);
    for (std::size_t i = 0; i < 5; ++i) {
      extents.push_back(writer.Append(NewRecord(i)));
    }
    writer.Seal();
  }
  const std::string before = Sha256::HexOfFile(path);
  ScanTape(path);
  ValidateTape(path);
  for (const ByteExtent& extent : extents) ReadRecordAt(path, extent);
  CHECK(Sha256::HexOfFile(path) == before);
}

TEST_CASE("create refuses non-empty destinations") {
  TempDir dir;
  const auto path = dir / "t.xmltape";
  test_support::WriteFile(path, "occupied");
  try {
    TapeWriter::Create(NewAdmin(), path);
    FAIL("expected write-once violation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kWriteOnceViolation);
  }
}

TEST_CASE("scan rejects malformed tapes with byte offsets") {
  MemoryTape tape;
  tape.writer.Append(NewRecord(0));
  tape.writer.Seal();
  const std::string bytes = tape.bytes();

  SUBCASE("truncation") {
    std::istringstream in(bytes.substr(0, bytes.size() / 2));
    try {
      ScanTape(in);
      FAIL("expected scan error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kScanError);
    }
  }

  SUBCASE("not a tape") {
    std::istringstream in("<?xml version=\"1.0\"?><other/>");
    CHECK_THROWS_AS(ScanTape(in), Error);
  }

  SUBCASE("text at tape level") {
    std::string bad = bytes;
    bad.insert(bad.find("<t:tapeRecord"), "stray");
    std::istringstream in(bad);
    CHECK_THROWS_AS(ScanTape(in), Error);
  }
}

TEST_CASE("validate reports structural findings with record ordinals") {
  TempDir dir;

  SUBCASE("a clean tape has no findings") {
    const auto path = dir / "ok.xmltape";
    TapeWriter writer = TapeWriter::Create(NewAdmin(), path);
    for (std::size_t i = 0; i < 4; ++i) writer.Append(NewRecord(i));
    writer.Seal();
    const ValidationReport report = ValidateTape(path);
    CHECK(report.ok());
    CHECK(report.scan_record_count == 4);
    CHECK(report.full_parse_record_count == 4);
  }

  SUBCASE("missing record datetime") {
    // Record 1 lacks the mandatory date element.
    const auto path = dir / "missing-date.xmltape";
    std::string doc = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    doc += "<t:tape xmlns:t=\"urn:xmltape:1.0\">\n<t:tapeAdmin>\n";
    doc += "<t:tapeId>" + RepoUri::Mint(UriClass::kTape).ToString() +
           "</t:tapeId>\n</t:tapeAdmin>\n";
    doc +=
        "<t:tapeRecord xmlns:t=\"urn:xmltape:1.0\">\n<t:recordAdmin>\n"
        "<t:identifier>id:a</t:identifier>\n"
        "<t:date>2025-08-10T12:00:00Z</t:date>\n</t:recordAdmin>\n"
        "<t:record><x:p xmlns:x=\"urn:x\"/></t:record>\n</t:tapeRecord>\n";
    doc +=
        "<t:tapeRecord xmlns:t=\"urn:xmltape:1.0\">\n<t:recordAdmin>\n"
        "<t:identifier>id:b</t:identifier>\n</t:recordAdmin>\n"
        "<t:record><x:p xmlns:x=\"urn:x\"/></t:record>\n</t:tapeRecord>\n";
    doc += "</t:tape>\n";
    test_support::WriteFile(path, doc);

    const ValidationReport report = ValidateTape(path);
    REQUIRE_FALSE(report.ok());
    bool found = false;
    for (const auto& finding : report.findings) {
      if (finding.detail.find("missing mandatory admin element") !=
          std::string::npos) {
        found = true;
        CHECK(finding.record_ordinal == 1);
      }
    }
    CHECK(found);
  }

  SUBCASE("duplicate identifiers") {
    const auto path = dir / "dup.xmltape";
    std::string doc = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    doc += "<t:tape xmlns:t=\"urn:xmltape:1.0\">\n<t:tapeAdmin>\n";
    doc += "<t:tapeId>" + RepoUri::Mint(UriClass::kTape).ToString() +
           "</t:tapeId>\n</t:tapeAdmin>\n";
    for (int i = 0; i < 2; ++i) {
      doc +=
          "<t:tapeRecord xmlns:t=\"urn:xmltape:1.0\">\n<t:recordAdmin>\n"
          "<t:identifier>id:same</t:identifier>\n"
          "<t:date>2025-08-10T12:00:00Z</t:date>\n</t:recordAdmin>\n"
          "<t:record><x:p xmlns:x=\"urn:x\"/></t:record>\n</t:tapeRecord>\n";
    }
    doc += "</t:tape>\n";
    test_support::WriteFile(path, doc);

    const ValidationReport report = ValidateTape(path);
    REQUIRE_FALSE(report.ok());
    CHECK(report.findings[0].code == "duplicate-identifier");
    CHECK(report.findings[0].record_ordinal == 1);
  }

  SUBCASE("truncated file") {
    const auto path = dir / "trunc.xmltape";
    MemoryTape tape;
    tape.writer.Append(NewRecord(0));
    tape.writer.Seal();
    const std::string bytes = tape.bytes();
    test_support::WriteFile(path, bytes.substr(0, bytes.size() - 12));

    const ValidationReport report = ValidateTape(path);
    REQUIRE_FALSE(report.ok());
    bool well_formedness_finding = false;
    for (const auto& finding : report.findings) {
      if (finding.code == "not-well-formed") well_formedness_finding = true;
    }
    CHECK(well_formedness_finding);
  }
}

TEST_CASE("payloads with surrounding whitespace in record are tolerated") {
  // Interoperating writers may put whitespace around the payload element;
  // the payload itself is still the element slice.
  std::string doc = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  doc += "<t:tape xmlns:t=\"urn:xmltape:1.0\">\n<t:tapeAdmin>\n";
  doc += "<t:tapeId>" + RepoUri::Mint(UriClass::kTape).ToString() +
         "</t:tapeId>\n</t:tapeAdmin>\n";
  doc +=
      "<t:tapeRecord xmlns:t=\"urn:xmltape:1.0\">\n<t:recordAdmin>\n"
      "<t:identifier>id:ws</t:identifier>\n"
      "<t:date>2025-08-10T12:00:00Z</t:date>\n</t:recordAdmin>\n"
      "<t:record>\n  <x:p xmlns:x=\"urn:x\">v</x:p>\n</t:record>\n"
      "</t:tapeRecord>\n</t:tape>\n";
  std::istringstream in(doc);
  const TapeScan scan = ScanTape(in);
  REQUIRE(scan.records.size() == 1);
  const TapeRecord record = ParseRecordSlice(doc.substr(
      scan.records[0].second.offset, scan.records[0].second.length));
  CHECK(record.payload == "<x:p xmlns:x=\"urn:x\">v</x:p>");
}
