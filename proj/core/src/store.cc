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

#include "tapestore/store.h"

#include <algorithm>

#include "tapestore/error.h"

namespace tapestore {

namespace {

std::vector<std::filesystem::path> ListWithExtension(
    const std::filesystem::path& dir, std::string_view extension) {
  std::vector<std::filesystem::path> out;
  std::error_code ec;
  std::filesystem::directory_iterator it(dir, ec);
  if (ec) return out;
  for (const auto& entry : it) {
    if (!entry.is_regular_file()) continue;
    const std::filesystem::path& path = entry.path();
    if (StoreLayout::IsTemporary(path)) continue;
    if (path.extension() == extension) out.push_back(path);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::filesystem::path StoreLayout::TapePath(const Uuid& uuid) const {
  return tapes_dir() / (uuid.ToString() + std::string(kTapeExtension));
}

std::filesystem::path StoreLayout::ArcPath(const Uuid& uuid) const {
  return arcs_dir() / (uuid.ToString() + std::string(kArcExtension));
}

void StoreLayout::EnsureDirectories() const {
  std::error_code ec;
  std::filesystem::create_directories(tapes_dir(), ec);
  std::filesystem::create_directories(arcs_dir(), ec);
  if (ec) {
    throw Error(Errc::kIoError, "cannot create store directories under " +
                                    root_.string());
  }
}

std::vector<std::filesystem::path> StoreLayout::ListTapes() const {
  return ListWithExtension(tapes_dir(), kTapeExtension);
}

std::vector<std::filesystem::path> StoreLayout::ListArcs() const {
  return ListWithExtension(arcs_dir(), kArcExtension);
}

bool StoreLayout::IsTemporary(const std::filesystem::path& path) {
  const std::string name = path.filename().string();
  return name.size() >= kTempSuffix.size() &&
         name.compare(name.size() - kTempSuffix.size(), kTempSuffix.size(),
                      kTempSuffix) == 0;
}

std::filesystem::path StoreLayout::TemporaryName(
    const std::filesystem::path& path) {
  return path.string() + std::string(kTempSuffix);
}

}  // namespace tapestore
