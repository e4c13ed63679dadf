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

#include "tapestore/locator.h"

#include <algorithm>

#include "tapestore/error.h"

namespace tapestore {

namespace {

bool VersionLess(const VersionEntry& a, const VersionEntry& b) {
  if (a.created != b.created) return a.created < b.created;
  return a.package_id < b.package_id;
}

std::string LogLine(const VersionEntry& entry) {
  return entry.content_id + '\t' + entry.package_id + '\t' +
         entry.tape_id.ToString() + '\t' + FormatIso(entry.created) + '\n';
}

void AppendLines(const std::filesystem::path& path, std::string_view lines) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) {
    throw Error(Errc::kIoError, "cannot open " + path.string());
  }
  out.write(lines.data(), static_cast<std::streamsize>(lines.size()));
  out.flush();
  if (!out) {
    throw Error(Errc::kIoError, "append failed on " + path.string());
  }
}

void RequireLoggableField(const std::string& value, std::string_view what) {
  if (value.empty()) {
    throw Error(Errc::kInvalidArgument, std::string(what) + " is empty");
  }
  for (const char c : value) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (u < 0x21 || u == 0x7f) {
      throw Error(Errc::kInvalidArgument,
                  std::string(what) + " contains whitespace or control bytes");
    }
  }
}

}  // namespace

std::string ExpandUuidTemplate(std::string_view tmpl, const Uuid& uuid) {
  constexpr std::string_view kPlaceholder = "{uuid}";
  const std::size_t at = tmpl.find(kPlaceholder);
  if (at == std::string_view::npos ||
      tmpl.find(kPlaceholder, at + 1) != std::string_view::npos) {
    throw Error(Errc::kInvalidArgument,
                "template must contain '{uuid}' exactly once: " +
                    std::string(tmpl));
  }
  std::string out(tmpl.substr(0, at));
  out += uuid.ToString();
  out += tmpl.substr(at + kPlaceholder.size());
  return out;
}

Locator::Locator(std::filesystem::path log_path,
                 std::shared_ptr<const Map> snapshot, std::size_t entry_count)
    : log_path_(std::move(log_path)),
      snapshot_(std::move(snapshot)),
      entry_count_(entry_count) {}

bool Locator::InsertInto(Map& map, const VersionEntry& entry) {
  auto& versions = map[entry.content_id];
  for (const VersionEntry& existing : versions) {
    if (existing.package_id == entry.package_id) {
      if (existing.tape_id == entry.tape_id &&
          existing.created == entry.created) {
        return false;  // exact duplicate: idempotent
      }
      throw Error(Errc::kConflict,
                  "version (" + entry.content_id + ", " + entry.package_id +
                      ") already registered with different tape or datetime");
    }
  }
  const auto at =
      std::upper_bound(versions.begin(), versions.end(), entry, VersionLess);
  versions.insert(at, entry);
  return true;
}

Locator Locator::Open(const std::filesystem::path& log_path) {
  auto map = std::make_shared<Map>();
  std::size_t count = 0;
  std::ifstream in(log_path, std::ios::binary);
  if (in) {
    std::string line;
    std::uint64_t offset = 0;
    while (std::getline(in, line)) {
      std::string_view rest(line);
      std::string_view fields[4];
      for (int i = 0; i < 3; ++i) {
        const std::size_t tab = rest.find('\t');
        if (tab == std::string_view::npos) {
          throw Error(Errc::kScanError, "malformed locator log line", offset);
        }
        fields[i] = rest.substr(0, tab);
        rest.remove_prefix(tab + 1);
      }
      fields[3] = rest;
      const auto tape_id = RepoUri::TryParse(fields[2]);
      const auto created = ParseIso(fields[3]);
      if (fields[0].empty() || fields[1].empty() || !tape_id ||
          tape_id->cls() != UriClass::kTape || !created) {
        throw Error(Errc::kScanError, "malformed locator log line", offset);
      }
      VersionEntry entry{std::string(fields[0]), std::string(fields[1]),
                         *tape_id, *created};
      if (InsertInto(*map, entry)) ++count;
      offset += line.size() + 1;
    }
    if (in.bad()) {
      throw Error(Errc::kIoError, "read error on " + log_path.string());
    }
  } else {
    AppendLines(log_path, "");  // create the log
  }
  return Locator(log_path, std::move(map), count);
}

void Locator::Register(const VersionEntry& entry) {
  RegisterAll({entry});
}

void Locator::RegisterAll(const std::vector<VersionEntry>& entries) {
  std::lock_guard lock(mu_);
  auto next = std::make_shared<Map>(*snapshot_);
  std::string lines;
  std::size_t added = 0;
  for (const VersionEntry& entry : entries) {
    RequireLoggableField(entry.content_id, "content identifier");
    RequireLoggableField(entry.package_id, "package identifier");
    if (InsertInto(*next, entry)) {
      lines += LogLine(entry);
      ++added;
    }
  }
  if (added == 0) return;
  // The log is the source of truth: make it durable before readers can see
  // the new snapshot.
  AppendLines(log_path_, lines);
  snapshot_ = std::move(next);
  entry_count_ += added;
}

std::vector<VersionEntry> Locator::Versions(std::string_view content_id) const {
  std::shared_ptr<const Map> snapshot;
  {
    std::lock_guard lock(mu_);
    snapshot = snapshot_;
  }
  const auto it = snapshot->find(std::string(content_id));
  if (it == snapshot->end()) return {};
  return it->second;
}

std::vector<ResolvedVersion> Locator::Resolve(
    std::string_view content_id, std::string_view oai_base_template) const {
  std::vector<ResolvedVersion> out;
  for (const VersionEntry& entry : Versions(content_id)) {
    out.push_back(ResolvedVersion{
        entry.package_id,
        ExpandUuidTemplate(oai_base_template, entry.tape_id.uuid()),
        entry.created});
  }
  return out;
}

std::size_t Locator::size() const {
  std::lock_guard lock(mu_);
  return entry_count_;
}

}  // namespace tapestore
