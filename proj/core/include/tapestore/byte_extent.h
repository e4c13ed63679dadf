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

#ifndef TAPESTORE_BYTE_EXTENT_H_
#define TAPESTORE_BYTE_EXTENT_H_

#include <compare>
#include <cstdint>

namespace tapestore {

// Location of a record inside an immutable file: the unit every index stores.
// Offsets and lengths are always measured on the encoded (on-disk) bytes.
struct ByteExtent {
  std::uint64_t offset = 0;
  std::uint64_t length = 0;

  std::uint64_t end() const { return offset + length; }

  friend auto operator<=>(const ByteExtent&, const ByteExtent&) = default;
};

}  // namespace tapestore

#endif  // TAPESTORE_BYTE_EXTENT_H_
