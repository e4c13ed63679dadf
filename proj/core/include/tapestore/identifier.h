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

#ifndef TAPESTORE_IDENTIFIER_H_
#define TAPESTORE_IDENTIFIER_H_

#include <compare>
#include <optional>
#include <string>
#include <string_view>

#include "tapestore/uuid.h"

namespace tapestore {

// The five identifier classes used throughout the store. Content identifiers
// are supplied by information providers and never minted; the other four are
// minted as UUID-based URIs in reserved sub-namespaces of info:lanl-repo/.
//
// Grammar:  repo-uri = "info:lanl-repo/" subns "/" UUID
//           subns    = "pkg" / "xmltape" / "arc" / "ds"
enum class UriClass {
  kPackage,
  kTape,
  kArc,
  kDatastream,
  kContent,
};

std::string_view UriClassName(UriClass cls);

class RepoUri {
 public:
  // Throws Errc::kInvalidClass for kContent: content identifiers are
  // externally assigned opaque URIs, never part of the minted namespace.
  RepoUri(UriClass cls, const Uuid& uuid);

  static RepoUri Mint(UriClass cls);

  // Strict grammar match; throws Errc::kMalformedIdentifier with the first
  // offending byte position. Total over arbitrary byte strings.
  static RepoUri Parse(std::string_view s);
  static std::optional<RepoUri> TryParse(std::string_view s);

  std::string ToString() const;

  UriClass cls() const { return cls_; }
  const Uuid& uuid() const { return uuid_; }

  friend auto operator<=>(const RepoUri&, const RepoUri&) = default;

 private:
  UriClass cls_;
  Uuid uuid_;
};

// Content identifiers are stored verbatim; the only requirement is URI shape:
// a scheme, a colon, and a non-empty remainder, with no whitespace or
// control bytes.
bool IsValidContentId(std::string_view s);

}  // namespace tapestore

#endif  // TAPESTORE_IDENTIFIER_H_
