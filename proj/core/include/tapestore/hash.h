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

#ifndef TAPESTORE_HASH_H_
#define TAPESTORE_HASH_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

namespace tapestore {

// Streaming SHA-256. Used for index staleness headers and content fidelity
// checks; hex digests are lowercase.
class Sha256 {
 public:
  Sha256();
  ~Sha256();

  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void Update(const void* data, std::size_t size);
  void Update(std::string_view bytes) { Update(bytes.data(), bytes.size()); }

  // Finalizes and returns the 64-char hex digest. The object must not be
  // updated afterwards.
  std::string HexDigest();

  static std::string Hex(std::string_view bytes);
  static std::string HexOfFile(const std::filesystem::path& path);

 private:
  void* ctx_;
};

}  // namespace tapestore

#endif  // TAPESTORE_HASH_H_
