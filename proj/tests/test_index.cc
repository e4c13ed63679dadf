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

#include "tapestore/index.h"

#include <doctest.h>

#include <algorithm>
#include <random>

#include "support/temp_dir.h"
#include "tapestore/error.h"
#include "tapestore/xmltape.h"

using namespace tapestore;
using test_support::TempDir;

namespace {

constexpr UtcSeconds kT0 = 1754827200;

// Builds a sealed tape with the given record datestamps; returns write-time
// entries in file order.
std::vector<IndexEntry> BuildTape(const std::filesystem::path& path,
                                  const std::vector<UtcSeconds>& stamps) {
  TapeAdmin admin{RepoUri::Mint(UriClass::kTape), {}, {}};
  TapeWriter writer = TapeWriter::Create(admin, path);
  std::vector<IndexEntry> entries;
  for (std::size_t i = 0; i < stamps.size(); ++i) {
    TapeRecord record;
    record.admin.record_id = RepoUri::Mint(UriClass::kPackage).ToString();
    record.admin.created = stamps[i];
    record.payload = "<p:d xmlns:p=\"urn:p\">" + std::to_string(i) + "</p:d>";
    const ByteExtent extent = writer.Append(record);
    entries.push_back(
        IndexEntry{record.admin.record_id, extent, stamps[i], i});
  }
  writer.Seal();
  return entries;
}

}  // namespace

TEST_CASE("datetime order breaks ties by file order") {
  TempDir dir;
  const auto path = dir / "t.xmltape";
  const UtcSeconds t1 = kT0;
  const UtcSeconds t2 = kT0 + 10;
  const auto entries = BuildTape(path, {t2, t1, t2});
  const TapeIndexPaths paths = WriteTapeIndexes(path, entries);

  const Index dt = Index::Load(paths.dt, path, IndexOrder::kByDatetime);
  REQUIRE(dt.entries().size() == 3);
  CHECK(dt.entries()[0].datestamp == t1);
  CHECK(dt.entries()[1].datestamp == t2);
  CHECK(dt.entries()[1].ordinal == 0);  // file order among equal stamps
  CHECK(dt.entries()[2].ordinal == 2);
}

TEST_CASE("indexes built from scan equal indexes built from the write log") {
  TempDir dir;
  const auto path = dir / "t.xmltape";
  std::vector<UtcSeconds> stamps;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) stamps.push_back(kT0 + rng() % 1000);
  const auto entries = BuildTape(path, stamps);

  const TapeIndexPaths paths = WriteTapeIndexes(path, entries);
  const std::string id_bytes = test_support::ReadFile(paths.id);
  const std::string dt_bytes = test_support::ReadFile(paths.dt);

  BuildTapeIndexes(path);  // rebuild via ScanTape
  CHECK(test_support::ReadFile(paths.id) == id_bytes);
  CHECK(test_support::ReadFile(paths.dt) == dt_bytes);
}

TEST_CASE("an empty tape yields two empty indexes") {
  TempDir dir;
  const auto path = dir / "t.xmltape";
  BuildTape(path, {});
  const TapeIndexPaths paths = BuildTapeIndexes(path);
  CHECK(Index::Load(paths.id, path, IndexOrder::kById).entries().empty());
  CHECK(
      Index::Load(paths.dt, path, IndexOrder::kByDatetime).entries().empty());
}

TEST_CASE("lookup returns write-time extents and survives reload") {
  TempDir dir;
  const auto path = dir / "t.xmltape";
  const auto entries = BuildTape(path, {kT0, kT0 + 1, kT0 + 2});
  const TapeIndexPaths paths = WriteTapeIndexes(path, entries);

  const Index first = Index::Load(paths.id, path, IndexOrder::kById);
  for (const IndexEntry& entry : entries) {
    const IndexEntry* found = first.LookupId(entry.key);
    REQUIRE(found != nullptr);
    CHECK(found->extent == entry.extent);
    const TapeRecord record = ReadRecordAt(path, found->extent);
    CHECK(record.admin.record_id == entry.key);
  }
  CHECK(first.LookupId("info:lanl-repo/pkg/00000000-0000-4000-8000-000000000000") ==
        nullptr);

  // Fresh process simulation: reload from disk, identical results.
  const Index second = Index::Load(paths.id, path, IndexOrder::kById);
  for (const IndexEntry& entry : entries) {
    const IndexEntry* a = first.LookupId(entry.key);
    const IndexEntry* b = second.LookupId(entry.key);
    REQUIRE(a != nullptr);
    REQUIRE(b != nullptr);
    CHECK(*a == *b);
  }
}

TEST_CASE("range queries match a brute-force filter") {
  TempDir dir;
  const auto path = dir / "t.xmltape";
  std::mt19937_64 rng(6);
  std::vector<UtcSeconds> stamps;
  for (int i = 0; i < 2000; ++i) stamps.push_back(kT0 + rng() % 500);
  const auto entries = BuildTape(path, stamps);
  const TapeIndexPaths paths = WriteTapeIndexes(path, entries);
  const Index dt = Index::Load(paths.dt, path, IndexOrder::kByDatetime);

  // Inclusive-bounds oracle over the unsorted write-time log.
  const auto brute_force = [&](std::optional<UtcSeconds> from,
                               std::optional<UtcSeconds> until) {
    std::vector<IndexEntry> out;
    for (const IndexEntry& entry : entries) {
      if (from && entry.datestamp < *from) continue;
      if (until && entry.datestamp > *until) continue;
      out.push_back(entry);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const IndexEntry& a, const IndexEntry& b) {
                       if (a.datestamp != b.datestamp) {
                         return a.datestamp < b.datestamp;
                       }
                       return a.ordinal < b.ordinal;
                     });
    return out;
  };

  for (int i = 0; i < 500; ++i) {
    std::optional<UtcSeconds> from;
    std::optional<UtcSeconds> until;
    if (rng() % 4 != 0) from = kT0 + rng() % 520 - 10;
    if (rng() % 4 != 0) until = kT0 + rng() % 520 - 10;
    if (from && until && *from > *until) std::swap(*from, *until);
    CHECK(dt.Range(from, until) == brute_force(from, until));
  }

  // Inclusive single-instant bound.
  const UtcSeconds t = stamps[42];
  const auto exact = dt.Range(t, t);
  CHECK(exact == brute_force(t, t));
  CHECK_FALSE(exact.empty());

  // Open bounds return everything, in order.
  CHECK(dt.Range(std::nullopt, std::nullopt).size() == entries.size());

  try {
    dt.Range(kT0 + 10, kT0);
    FAIL("expected invalid range");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kInvalidRange);
  }
}

TEST_CASE("completeness: both indexes cover every record") {
  TempDir dir;
  const auto path = dir / "t.xmltape";
  const auto entries = BuildTape(path, {kT0, kT0, kT0 + 5, kT0 + 9});
  const TapeIndexPaths paths = WriteTapeIndexes(path, entries);
  CHECK(Index::Load(paths.id, path, IndexOrder::kById).entries().size() == 4);
  CHECK(Index::Load(paths.dt, path, IndexOrder::kByDatetime)
            .entries()
            .size() == 4);
}

TEST_CASE("rebuilds are byte-identical") {
  TempDir dir;
  const auto path = dir / "t.xmltape";
  BuildTape(path, {kT0 + 3, kT0 + 1, kT0 + 2});
  const TapeIndexPaths paths = BuildTapeIndexes(path);
  const std::string id_bytes = test_support::ReadFile(paths.id);
  const std::string dt_bytes = test_support::ReadFile(paths.dt);
  for (int i = 0; i < 3; ++i) {
    BuildTapeIndexes(path);
    CHECK(test_support::ReadFile(paths.id) == id_bytes);
    CHECK(test_support::ReadFile(paths.dt) == dt_bytes);
  }
}

TEST_CASE("staleness detection") {
  TempDir dir;
  const auto path = dir / "t.xmltape";
  BuildTape(path, {kT0});
  const TapeIndexPaths paths = BuildTapeIndexes(path);

  SUBCASE("content change of equal size") {
    std::string bytes = test_support::ReadFile(path);
    bytes[bytes.size() / 2] ^= 0x01;
    test_support::WriteFile(path, bytes);
    try {
      Index::Load(paths.id, path, IndexOrder::kById);
      FAIL("expected stale index");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kStaleIndex);
    }
  }

  SUBCASE("size change") {
    std::string bytes = test_support::ReadFile(path);
    bytes += "\n";
    test_support::WriteFile(path, bytes);
    CHECK_THROWS_AS(Index::Load(paths.dt, path, IndexOrder::kByDatetime),
                    Error);
  }

  SUBCASE("unchecked load ignores the target") {
    CHECK_NOTHROW(Index::LoadUnchecked(paths.id, IndexOrder::kById));
  }
}

TEST_CASE("malformed index files are rejected") {
  TempDir dir;
  const auto path = dir / "t.xmltape";
  BuildTape(path, {kT0, kT0 + 1});
  const TapeIndexPaths paths = BuildTapeIndexes(path);

  SUBCASE("missing header") {
    std::string bytes = test_support::ReadFile(paths.id);
    bytes = bytes.substr(bytes.find('\n') + 1);
    test_support::WriteFile(paths.id, bytes);
    CHECK_THROWS_AS(Index::LoadUnchecked(paths.id, IndexOrder::kById), Error);
  }

  SUBCASE("wrong field count") {
    std::string bytes = test_support::ReadFile(paths.id);
    bytes += "only-one-field\n";
    test_support::WriteFile(paths.id, bytes);
    CHECK_THROWS_AS(Index::LoadUnchecked(paths.id, IndexOrder::kById), Error);
  }

  SUBCASE("entries out of canonical order") {
    std::string bytes = test_support::ReadFile(paths.id);
    const std::size_t header_end = bytes.find('\n') + 1;
    const std::size_t second_line = bytes.find('\n', header_end) + 1;
    const std::string line1 =
        bytes.substr(header_end, second_line - header_end);
    const std::string line2 = bytes.substr(second_line);
    test_support::WriteFile(paths.id,
                            bytes.substr(0, header_end) + line2 + line1);
    CHECK_THROWS_AS(Index::LoadUnchecked(paths.id, IndexOrder::kById), Error);
  }
}

TEST_CASE("keys with embedded whitespace are refused at write time") {
  TempDir dir;
  const auto path = dir / "t.xmltape";
  BuildTape(path, {kT0});
  std::vector<IndexEntry> entries{
      IndexEntry{"key with space", ByteExtent{0, 1}, kT0, 0}};
  try {
    WriteIndexFile(dir / "bad.idx.id", path, entries, IndexOrder::kById);
    FAIL("expected invalid argument");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kInvalidArgument);
  }
}
