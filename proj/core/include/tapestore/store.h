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

#ifndef TAPESTORE_STORE_H_
#define TAPESTORE_STORE_H_

#include <filesystem>
#include <string_view>
#include <vector>

#include "tapestore/uuid.h"

namespace tapestore {

// Store root layout. Sealed files are visible under their final names;
// in-flight files carry the .tmp suffix and are ignored by every reader.
//
//   <root>/tapes/<uuid>.xmltape        + .idx.id / .idx.dt sidecars
//   <root>/arcs/<uuid>.arc             + .idx.id sidecar
//   <root>/locator.log
inline constexpr std::string_view kTempSuffix = ".tmp";
inline constexpr std::string_view kTapeExtension = ".xmltape";
inline constexpr std::string_view kArcExtension = ".arc";

class StoreLayout {
 public:
  explicit StoreLayout(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path tapes_dir() const { return root_ / "tapes"; }
  std::filesystem::path arcs_dir() const { return root_ / "arcs"; }
  std::filesystem::path locator_log() const { return root_ / "locator.log"; }

  std::filesystem::path TapePath(const Uuid& uuid) const;
  std::filesystem::path ArcPath(const Uuid& uuid) const;

  void EnsureDirectories() const;

  // Visible (non-temporary) sealed files, sorted by name.
  std::vector<std::filesystem::path> ListTapes() const;
  std::vector<std::filesystem::path> ListArcs() const;

  static bool IsTemporary(const std::filesystem::path& path);
  static std::filesystem::path TemporaryName(
      const std::filesystem::path& path);

 private:
  std::filesystem::path root_;
};

}  // namespace tapestore

#endif  // TAPESTORE_STORE_H_
