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

#include "tapestore/wrapper.h"

#include "tapestore/error.h"
#include "tapestore/xml.h"

namespace tapestore {

namespace {

bool IsUnreserved(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_' ||
         c == '~';
}

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

bool IsAbsoluteHttpUrl(std::string_view url) {
  std::string_view rest;
  if (url.rfind("http://", 0) == 0) {
    rest = url.substr(7);
  } else if (url.rfind("https://", 0) == 0) {
    rest = url.substr(8);
  } else {
    return false;
  }
  if (rest.empty() || rest[0] == '/') return false;
  for (const char c : url) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (u <= 0x20 || u == 0x7f) return false;
  }
  return true;
}

// Verbatim slice of the element `child` out of `bytes`.
std::string SliceOf(std::string_view bytes, const xml::Element& child) {
  return std::string(bytes.substr(child.begin, child.end - child.begin));
}

}  // namespace

std::string PercentEncode(std::string_view raw) {
  static const char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(raw.size());
  for (const char c : raw) {
    if (IsUnreserved(c)) {
      out.push_back(c);
    } else {
      const unsigned char u = static_cast<unsigned char>(c);
      out.push_back('%');
      out.push_back(kHex[u >> 4]);
      out.push_back(kHex[u & 0x0f]);
    }
  }
  return out;
}

std::string PercentDecode(std::string_view encoded) {
  std::string out;
  out.reserve(encoded.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] == '%' && i + 2 < encoded.size()) {
      const int hi = HexValue(encoded[i + 1]);
      const int lo = HexValue(encoded[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>((hi << 4) | lo));
        i += 2;
        continue;
      }
    }
    out.push_back(encoded[i]);
  }
  return out;
}

std::string MakeOpenUrl(std::string_view arc_base_url, const RepoUri& ds_id) {
  if (!IsAbsoluteHttpUrl(arc_base_url)) {
    throw Error(Errc::kInvalidBase,
                "OpenURL base must be an absolute HTTP URL: " +
                    std::string(arc_base_url));
  }
  if (ds_id.cls() != UriClass::kDatastream) {
    throw Error(Errc::kInvalidClass, "OpenURL referent must be a datastream");
  }
  std::string out(arc_base_url);
  out += "?url_ver=Z39.88-2004&rft_id=";
  out += PercentEncode(ds_id.ToString());
  return out;
}

std::string WrapperToXml(const WrapperDocument& doc) {
  if (doc.package_id.cls() != UriClass::kPackage) {
    throw Error(Errc::kInvalidClass, "wrapper requires a package identifier");
  }
  if (!IsValidContentId(doc.content_id)) {
    throw Error(Errc::kInvalidArgument,
                "content identifier is not URI-shaped: " + doc.content_id);
  }
  try {
    xml::ParseStandaloneElement(doc.metadata_xml);
  } catch (const Error& e) {
    throw Error(Errc::kPayloadError,
                std::string("metadata is not a well-formed standalone "
                            "element: ") +
                    e.what());
  }
  std::string out = "<w:object xmlns:w=\"urn:xmltape:wrapper:1.0\"";
  out += " packageId=\"" + xml::EscapeAttr(doc.package_id.ToString()) + "\"";
  out += " contentId=\"" + xml::EscapeAttr(doc.content_id) + "\"";
  out += " created=\"" + FormatIso(doc.created) + "\">\n";
  out += "<w:metadata>";
  out += doc.metadata_xml;
  out += "</w:metadata>\n";
  for (const DatastreamRef& ref : doc.datastreams) {
    if (ref.ds_id.cls() != UriClass::kDatastream) {
      throw Error(Errc::kInvalidClass, "datastream reference of wrong class");
    }
    out += "<w:datastream dsId=\"" + xml::EscapeAttr(ref.ds_id.ToString()) +
           "\" mediaType=\"" + xml::EscapeAttr(ref.media_type) + "\" ref=\"" +
           xml::EscapeAttr(ref.openurl) + "\"/>\n";
  }
  out += "</w:object>";
  return out;
}

WrapperDocument ParseWrapperXml(std::string_view bytes) {
  xml::Element root = [&] {
    try {
      return xml::ParseStandaloneElement(bytes);
    } catch (const Error& e) {
      throw Error(Errc::kPayloadError,
                  std::string("wrapper is not well-formed: ") + e.what());
    }
  }();
  if (!root.Is(kWrapperNsUri, "object")) {
    throw Error(Errc::kPayloadError,
                "expected wrapper object element, found '" + root.qname + "'");
  }
  const std::string* package_attr = root.FindAttr("packageId");
  const std::string* content_attr = root.FindAttr("contentId");
  const std::string* created_attr = root.FindAttr("created");
  if (package_attr == nullptr || content_attr == nullptr ||
      created_attr == nullptr) {
    throw Error(Errc::kPayloadError,
                "wrapper object needs packageId, contentId and created");
  }
  const auto package_id = RepoUri::TryParse(*package_attr);
  if (!package_id || package_id->cls() != UriClass::kPackage) {
    throw Error(Errc::kPayloadError, "bad packageId '" + *package_attr + "'");
  }
  const auto created = ParseIso(*created_attr);
  if (!created) {
    throw Error(Errc::kPayloadError, "bad created datetime '" + *created_attr +
                                         "'");
  }
  if (root.children.empty() ||
      !root.children[0].Is(kWrapperNsUri, "metadata")) {
    throw Error(Errc::kPayloadError, "wrapper must start with metadata");
  }
  const xml::Element& metadata = root.children[0];
  if (metadata.children.size() != 1) {
    throw Error(Errc::kPayloadError,
                "metadata must wrap exactly one element");
  }
  WrapperDocument doc{*package_id, *content_attr, *created,
                      SliceOf(bytes, metadata.children[0]), {}};
  for (std::size_t i = 1; i < root.children.size(); ++i) {
    const xml::Element& child = root.children[i];
    if (!child.Is(kWrapperNsUri, "datastream")) {
      throw Error(Errc::kPayloadError,
                  "unexpected element '" + child.qname + "' in wrapper");
    }
    const std::string* ds_attr = child.FindAttr("dsId");
    const std::string* media_attr = child.FindAttr("mediaType");
    const std::string* ref_attr = child.FindAttr("ref");
    if (ds_attr == nullptr || media_attr == nullptr || ref_attr == nullptr) {
      throw Error(Errc::kPayloadError,
                  "datastream reference needs dsId, mediaType and ref");
    }
    const auto ds_id = RepoUri::TryParse(*ds_attr);
    if (!ds_id || ds_id->cls() != UriClass::kDatastream) {
      throw Error(Errc::kPayloadError, "bad dsId '" + *ds_attr + "'");
    }
    doc.datastreams.push_back(DatastreamRef{*ds_id, *media_attr, *ref_attr});
  }
  return doc;
}

}  // namespace tapestore
