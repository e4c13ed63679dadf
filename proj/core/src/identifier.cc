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

#include "tapestore/identifier.h"

#include "tapestore/error.h"

namespace tapestore {

namespace {

constexpr std::string_view kPrefix = "info:lanl-repo/";

std::string_view SubNamespaceToken(UriClass cls) {
  switch (cls) {
    case UriClass::kPackage:
      return "pkg";
    case UriClass::kTape:
      return "xmltape";
    case UriClass::kArc:
      return "arc";
    case UriClass::kDatastream:
      return "ds";
    case UriClass::kContent:
      break;
  }
  return {};
}

std::optional<UriClass> ClassForToken(std::string_view token) {
  if (token == "pkg") return UriClass::kPackage;
  if (token == "xmltape") return UriClass::kTape;
  if (token == "arc") return UriClass::kArc;
  if (token == "ds") return UriClass::kDatastream;
  return std::nullopt;
}

// First position where `s` stops matching `expected` (or s.size() if `s` is
// a strict prefix of it).
std::uint64_t MismatchAt(std::string_view s, std::string_view expected) {
  std::size_t i = 0;
  while (i < s.size() && i < expected.size() && s[i] == expected[i]) ++i;
  return i;
}

bool IsSchemeStart(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool IsSchemeChar(char c) {
  return IsSchemeStart(c) || (c >= '0' && c <= '9') || c == '+' || c == '-' ||
         c == '.';
}

}  // namespace

std::string_view UriClassName(UriClass cls) {
  switch (cls) {
    case UriClass::kPackage:
      return "package";
    case UriClass::kTape:
      return "tape";
    case UriClass::kArc:
      return "arc";
    case UriClass::kDatastream:
      return "datastream";
    case UriClass::kContent:
      return "content";
  }
  return "?";
}

RepoUri::RepoUri(UriClass cls, const Uuid& uuid) : cls_(cls), uuid_(uuid) {
  if (cls == UriClass::kContent) {
    throw Error(Errc::kInvalidClass,
                "content identifiers are externally assigned, not minted");
  }
}

RepoUri RepoUri::Mint(UriClass cls) {
  return RepoUri(cls, Uuid::Random());
}

RepoUri RepoUri::Parse(std::string_view s) {
  if (s.substr(0, kPrefix.size()) != kPrefix) {
    throw Error(Errc::kMalformedIdentifier, "expected prefix 'info:lanl-repo/'",
                MismatchAt(s, kPrefix));
  }
  const std::size_t subns_start = kPrefix.size();
  const std::size_t slash = s.find('/', subns_start);
  if (slash == std::string_view::npos) {
    throw Error(Errc::kMalformedIdentifier, "missing '/' after sub-namespace",
                s.size());
  }
  const std::string_view token = s.substr(subns_start, slash - subns_start);
  const auto cls = ClassForToken(token);
  if (!cls) {
    throw Error(Errc::kMalformedIdentifier,
                "unknown sub-namespace '" + std::string(token) + "'",
                subns_start);
  }
  const std::string_view uuid_part = s.substr(slash + 1);
  const auto uuid = Uuid::Parse(uuid_part);
  if (!uuid) {
    throw Error(Errc::kMalformedIdentifier,
                "UUID must be canonical lowercase hex-with-hyphens",
                slash + 1);
  }
  return RepoUri(*cls, *uuid);
}

std::optional<RepoUri> RepoUri::TryParse(std::string_view s) {
  try {
    return Parse(s);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string RepoUri::ToString() const {
  std::string out(kPrefix);
  out += SubNamespaceToken(cls_);
  out += '/';
  out += uuid_.ToString();
  return out;
}

bool IsValidContentId(std::string_view s) {
  const std::size_t colon = s.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == s.size()) {
    return false;
  }
  if (!IsSchemeStart(s[0])) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    if (!IsSchemeChar(s[i])) return false;
  }
  for (const char c : s) {
    if (static_cast<unsigned char>(c) <= 0x20 || c == 0x7f) return false;
  }
  return true;
}

}  // namespace tapestore
