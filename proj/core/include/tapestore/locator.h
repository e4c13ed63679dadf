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

#ifndef TAPESTORE_LOCATOR_H_
#define TAPESTORE_LOCATOR_H_

#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tapestore/identifier.h"
#include "tapestore/timeutil.h"

namespace tapestore {

// Identifier locator: maps a Content Identifier to every stored version of
// the Digital Object (Package Identifier plus owning tape). Persistence is
// an append-only tab-separated log replayed at startup:
//
//   content_id \t package_id \t tape_id \t created \n
struct VersionEntry {
  std::string content_id;
  std::string package_id;
  RepoUri tape_id;
  UtcSeconds created = 0;
};

// Version of a Digital Object resolved for an agent: the OAI-PMH base URL
// of the owning tape is derived from a configured template.
struct ResolvedVersion {
  std::string package_id;
  std::string oai_base_url;
  UtcSeconds created = 0;
};

// Expands a `{uuid}` template placeholder. Throws Errc::kInvalidArgument
// unless the template contains the placeholder exactly once.
std::string ExpandUuidTemplate(std::string_view tmpl, const Uuid& uuid);

class Locator {
 public:
  // Replays the log (creating an empty one if missing) and opens it for
  // appending.
  static Locator Open(const std::filesystem::path& log_path);

  Locator(Locator&& other) noexcept
      : log_path_(std::move(other.log_path_)),
        snapshot_(std::move(other.snapshot_)),
        entry_count_(other.entry_count_) {}

  // Appends durably. Exact duplicates are idempotent; a re-registration of
  // the same (content_id, package_id) pair with a different tape or
  // datetime raises Errc::kConflict.
  void Register(const VersionEntry& entry);
  void RegisterAll(const std::vector<VersionEntry>& entries);

  // All versions of a Digital Object, oldest first (created, then
  // package_id bytes). Unknown ids yield an empty list.
  std::vector<VersionEntry> Versions(std::string_view content_id) const;

  std::vector<ResolvedVersion> Resolve(std::string_view content_id,
                                       std::string_view oai_base_template) const;

  std::size_t size() const;

 private:
  using Map = std::unordered_map<std::string, std::vector<VersionEntry>>;

  Locator(std::filesystem::path log_path, std::shared_ptr<const Map> snapshot,
          std::size_t entry_count);

  // Returns false for an exact duplicate; throws on conflicts.
  static bool InsertInto(Map& map, const VersionEntry& entry);

  std::filesystem::path log_path_;
  mutable std::mutex mu_;
  std::shared_ptr<const Map> snapshot_;  // swapped atomically after appends
  std::size_t entry_count_ = 0;
};

}  // namespace tapestore

#endif  // TAPESTORE_LOCATOR_H_
