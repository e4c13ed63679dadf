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

#ifndef TAPESTORE_INDEX_H_
#define TAPESTORE_INDEX_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tapestore/byte_extent.h"
#include "tapestore/timeutil.h"

namespace tapestore {

// Per-tape and per-ARC indexes: the disconnected, rebuildable structures
// that map keys to byte extents. The on-disk format is portable and
// deterministic so rebuilds are byte-identical:
//
//   # size=<target bytes> sha256=<target hash>\n
//   key \t offset \t length \t datestamp \t ordinal \n   (per entry)
//
// Id indexes sort entries by key bytes; datetime indexes by
// (datestamp, ordinal). Files are written to a temporary name and renamed.

struct IndexEntry {
  std::string key;
  ByteExtent extent;
  UtcSeconds datestamp = 0;
  std::uint64_t ordinal = 0;  // record position in file order

  friend bool operator==(const IndexEntry&, const IndexEntry&) = default;
};

enum class IndexOrder { kById, kByDatetime };

class Index {
 public:
  // Loads and verifies the staleness header against the target file's
  // current size and hash; throws Errc::kStaleIndex on mismatch.
  static Index Load(const std::filesystem::path& index_path,
                    const std::filesystem::path& target_path,
                    IndexOrder order);

  // Loads without checking the target (for tools that inspect indexes).
  static Index LoadUnchecked(const std::filesystem::path& index_path,
                             IndexOrder order);

  // Point lookup by key; id-ordered indexes only.
  const IndexEntry* LookupId(std::string_view key) const;

  // All entries with from <= datestamp <= until, inclusive at both ends at
  // seconds granularity, in (datestamp, ordinal) order; absent bounds are
  // open. Datetime-ordered indexes only. Throws Errc::kInvalidRange when
  // from > until.
  std::vector<IndexEntry> Range(std::optional<UtcSeconds> from,
                                std::optional<UtcSeconds> until) const;

  const std::vector<IndexEntry>& entries() const { return entries_; }
  IndexOrder order() const { return order_; }
  const std::string& target_sha256() const { return target_sha256_; }

 private:
  Index(IndexOrder order, std::vector<IndexEntry> entries,
        std::string target_sha256)
      : order_(order),
        entries_(std::move(entries)),
        target_sha256_(std::move(target_sha256)) {}

  static Index LoadInternal(const std::filesystem::path& index_path,
                            IndexOrder order, std::string* header_size_out);

  IndexOrder order_;
  std::vector<IndexEntry> entries_;
  std::string target_sha256_;
};

// Writes one index file for `target` (already sealed). Entries are given in
// file order; the canonical sort for `order` is applied before writing.
// Duplicate keys in an id index raise Errc::kDuplicateKey.
void WriteIndexFile(const std::filesystem::path& index_path,
                    const std::filesystem::path& target_path,
                    std::vector<IndexEntry> entries, IndexOrder order);

// Sidecar naming: <file>.idx.id and <file>.idx.dt.
std::filesystem::path IdIndexPathFor(const std::filesystem::path& target);
std::filesystem::path DtIndexPathFor(const std::filesystem::path& target);

struct TapeIndexPaths {
  std::filesystem::path id;
  std::filesystem::path dt;
};

// Builds both tape indexes by rescanning the sealed tape.
TapeIndexPaths BuildTapeIndexes(const std::filesystem::path& tape_path);

// Builds both tape indexes from a write-time extent log (entries in file
// order, ordinals ignored and reassigned).
TapeIndexPaths WriteTapeIndexes(const std::filesystem::path& tape_path,
                                std::vector<IndexEntry> entries);

// Builds the per-ARC id index (datastream identifier -> extent) by
// rescanning; the version block is excluded.
std::filesystem::path BuildArcIndex(const std::filesystem::path& arc_path);

// Same from write-time entries.
std::filesystem::path WriteArcIndex(const std::filesystem::path& arc_path,
                                    std::vector<IndexEntry> entries);

}  // namespace tapestore

#endif  // TAPESTORE_INDEX_H_
