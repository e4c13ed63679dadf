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

#ifndef TAPESTORE_UUID_H_
#define TAPESTORE_UUID_H_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tapestore {

// 128-bit UUID. Minted ids are random (version 4); the canonical rendering
// is lowercase hex with hyphens, and parsing accepts only that form.
struct Uuid {
  std::array<std::uint8_t, 16> bytes{};

  static Uuid Random();
  static std::optional<Uuid> Parse(std::string_view s);

  std::string ToString() const;

  friend auto operator<=>(const Uuid&, const Uuid&) = default;
};

}  // namespace tapestore

#endif  // TAPESTORE_UUID_H_
