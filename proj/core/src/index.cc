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

#include <algorithm>
#include <charconv>
#include <fstream>

#include "tapestore/arc_file.h"
#include "tapestore/error.h"
#include "tapestore/hash.h"
#include "tapestore/xmltape.h"

namespace tapestore {

namespace {

bool EntryLessById(const IndexEntry& a, const IndexEntry& b) {
  return a.key < b.key;
}

bool EntryLessByDatetime(const IndexEntry& a, const IndexEntry& b) {
  if (a.datestamp != b.datestamp) return a.datestamp < b.datestamp;
  return a.ordinal < b.ordinal;
}

void RequireIndexableKey(const std::string& key) {
  if (key.empty()) {
    throw Error(Errc::kInvalidArgument, "index key is empty");
  }
  for (const char c : key) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (u < 0x21 || u == 0x7f) {
      throw Error(Errc::kInvalidArgument,
                  "index key contains whitespace or control bytes: " + key);
    }
  }
}

bool ParseU64(std::string_view s, std::uint64_t* out) {
  if (s.empty() || (s.size() > 1 && s[0] == '0')) return false;
  const auto [ptr, ec] =
      std::from_chars(s.data(), s.data() + s.size(), *out, 10);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<IndexEntry> CanonicalSort(std::vector<IndexEntry> entries,
                                      IndexOrder order) {
  if (order == IndexOrder::kById) {
    std::sort(entries.begin(), entries.end(), EntryLessById);
    for (std::size_t i = 1; i < entries.size(); ++i) {
      if (entries[i - 1].key == entries[i].key) {
        throw Error(Errc::kDuplicateKey,
                    "duplicate index key: " + entries[i].key);
      }
    }
  } else {
    std::sort(entries.begin(), entries.end(), EntryLessByDatetime);
  }
  return entries;
}

}  // namespace

void WriteIndexFile(const std::filesystem::path& index_path,
                    const std::filesystem::path& target_path,
                    std::vector<IndexEntry> entries, IndexOrder order) {
  for (const IndexEntry& entry : entries) {
    RequireIndexableKey(entry.key);
  }
  entries = CanonicalSort(std::move(entries), order);

  const std::uint64_t target_size = std::filesystem::file_size(target_path);
  const std::string target_hash = Sha256::HexOfFile(target_path);

  const std::filesystem::path tmp = index_path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(Errc::kIoError, "cannot open " + tmp.string());
    }
    out << "# size=" << target_size << " sha256=" << target_hash << "\n";
    for (const IndexEntry& entry : entries) {
      out << entry.key << '\t' << entry.extent.offset << '\t'
          << entry.extent.length << '\t' << FormatIso(entry.datestamp) << '\t'
          << entry.ordinal << '\n';
    }
    out.flush();
    if (!out) {
      throw Error(Errc::kIoError, "write failed on " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, index_path);
}

Index Index::LoadInternal(const std::filesystem::path& index_path,
                          IndexOrder order, std::string* header_size_out) {
  std::ifstream in(index_path, std::ios::binary);
  if (!in) {
    throw Error(Errc::kIoError, "cannot open " + index_path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line.rfind("# size=", 0) != 0) {
    throw Error(Errc::kScanError,
                "missing staleness header in " + index_path.string(), 0);
  }
  const std::size_t hash_at = line.find(" sha256=");
  if (hash_at == std::string::npos) {
    throw Error(Errc::kScanError,
                "malformed staleness header in " + index_path.string(), 0);
  }
  *header_size_out = line.substr(7, hash_at - 7);
  std::string header_hash = line.substr(hash_at + 8);
  if (header_hash.size() != 64) {
    throw Error(Errc::kScanError,
                "malformed staleness header in " + index_path.string(), 0);
  }

  std::vector<IndexEntry> entries;
  std::uint64_t offset = line.size() + 1;
  while (std::getline(in, line)) {
    IndexEntry entry;
    // key \t offset \t length \t datestamp \t ordinal
    std::string_view rest(line);
    std::string_view fields[5];
    for (int i = 0; i < 4; ++i) {
      const std::size_t tab = rest.find('\t');
      if (tab == std::string_view::npos) {
        throw Error(Errc::kScanError, "malformed index line", offset);
      }
      fields[i] = rest.substr(0, tab);
      rest.remove_prefix(tab + 1);
    }
    fields[4] = rest;
    entry.key = std::string(fields[0]);
    std::uint64_t ordinal = 0;
    const auto datestamp = ParseIso(fields[3]);
    if (entry.key.empty() || !ParseU64(fields[1], &entry.extent.offset) ||
        !ParseU64(fields[2], &entry.extent.length) || !datestamp ||
        !ParseU64(fields[4], &ordinal)) {
      throw Error(Errc::kScanError, "malformed index line", offset);
    }
    entry.datestamp = *datestamp;
    entry.ordinal = ordinal;
    entries.push_back(std::move(entry));
    offset += line.size() + 1;
  }
  if (in.bad()) {
    throw Error(Errc::kIoError, "read error on " + index_path.string());
  }
  // Entries must already be in canonical order; lookups binary-search.
  const auto less =
      order == IndexOrder::kById ? EntryLessById : EntryLessByDatetime;
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (less(entries[i], entries[i - 1])) {
      throw Error(Errc::kScanError,
                  "index entries out of order in " + index_path.string(), 0);
    }
    if (order == IndexOrder::kById && entries[i - 1].key == entries[i].key) {
      throw Error(Errc::kDuplicateKey,
                  "duplicate index key: " + entries[i].key);
    }
  }
  return Index(order, std::move(entries), std::move(header_hash));
}

Index Index::Load(const std::filesystem::path& index_path,
                  const std::filesystem::path& target_path, IndexOrder order) {
  std::string header_size;
  Index index = LoadInternal(index_path, order, &header_size);
  std::uint64_t declared = 0;
  if (!ParseU64(header_size, &declared)) {
    throw Error(Errc::kScanError,
                "malformed staleness header in " + index_path.string(), 0);
  }
  std::error_code ec;
  const std::uint64_t actual = std::filesystem::file_size(target_path, ec);
  if (ec) {
    throw Error(Errc::kIoError, "cannot stat " + target_path.string());
  }
  if (actual != declared) {
    throw Error(Errc::kStaleIndex,
                "index " + index_path.string() + " records size " +
                    header_size + " but target has " + std::to_string(actual));
  }
  if (Sha256::HexOfFile(target_path) != index.target_sha256()) {
    throw Error(Errc::kStaleIndex,
                "index " + index_path.string() +
                    " does not match the target file contents");
  }
  return index;
}

Index Index::LoadUnchecked(const std::filesystem::path& index_path,
                           IndexOrder order) {
  std::string ignored;
  return LoadInternal(index_path, order, &ignored);
}

const IndexEntry* Index::LookupId(std::string_view key) const {
  if (order_ != IndexOrder::kById) {
    throw Error(Errc::kInvalidArgument, "lookup on a datetime-ordered index");
  }
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), key,
      [](const IndexEntry& e, std::string_view k) { return e.key < k; });
  if (it == entries_.end() || it->key != key) return nullptr;
  return &*it;
}

std::vector<IndexEntry> Index::Range(std::optional<UtcSeconds> from,
                                     std::optional<UtcSeconds> until) const {
  if (order_ != IndexOrder::kByDatetime) {
    throw Error(Errc::kInvalidArgument, "range on an id-ordered index");
  }
  if (from && until && *from > *until) {
    throw Error(Errc::kInvalidRange, "from " + FormatIso(*from) +
                                         " is after until " +
                                         FormatIso(*until));
  }
  auto begin = entries_.begin();
  auto end = entries_.end();
  if (from) {
    begin = std::lower_bound(entries_.begin(), entries_.end(), *from,
                             [](const IndexEntry& e, UtcSeconds t) {
                               return e.datestamp < t;
                             });
  }
  if (until) {
    end = std::upper_bound(begin, entries_.end(), *until,
                           [](UtcSeconds t, const IndexEntry& e) {
                             return t < e.datestamp;
                           });
  }
  return std::vector<IndexEntry>(begin, end);
}

std::filesystem::path IdIndexPathFor(const std::filesystem::path& target) {
  return target.string() + ".idx.id";
}

std::filesystem::path DtIndexPathFor(const std::filesystem::path& target) {
  return target.string() + ".idx.dt";
}

TapeIndexPaths WriteTapeIndexes(const std::filesystem::path& tape_path,
                                std::vector<IndexEntry> entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    entries[i].ordinal = i;
  }
  const TapeIndexPaths paths{IdIndexPathFor(tape_path),
                             DtIndexPathFor(tape_path)};
  WriteIndexFile(paths.id, tape_path, entries, IndexOrder::kById);
  WriteIndexFile(paths.dt, tape_path, std::move(entries),
                 IndexOrder::kByDatetime);
  return paths;
}

TapeIndexPaths BuildTapeIndexes(const std::filesystem::path& tape_path) {
  const TapeScan scan = ScanTape(tape_path);
  std::vector<IndexEntry> entries;
  entries.reserve(scan.records.size());
  for (const auto& [admin, extent] : scan.records) {
    entries.push_back(IndexEntry{admin.record_id, extent, admin.created, 0});
  }
  return WriteTapeIndexes(tape_path, std::move(entries));
}

std::filesystem::path WriteArcIndex(const std::filesystem::path& arc_path,
                                    std::vector<IndexEntry> entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    entries[i].ordinal = i;
  }
  const std::filesystem::path path = IdIndexPathFor(arc_path);
  WriteIndexFile(path, arc_path, std::move(entries), IndexOrder::kById);
  return path;
}

std::filesystem::path BuildArcIndex(const std::filesystem::path& arc_path) {
  const auto records = ScanArc(arc_path);
  std::vector<IndexEntry> entries;
  for (std::size_t i = 1; i < records.size(); ++i) {  // skip version block
    const auto& [header, extent] = records[i];
    entries.push_back(IndexEntry{header.url, extent, header.archived, 0});
  }
  return WriteArcIndex(arc_path, std::move(entries));
}

}  // namespace tapestore
