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

#ifndef TAPESTORE_WRAPPER_H_
#define TAPESTORE_WRAPPER_H_

#include <string>
#include <string_view>
#include <vector>

#include "tapestore/identifier.h"
#include "tapestore/timeutil.h"

namespace tapestore {

// XML representation of one Digital Object, stored as one tape record:
// descriptive metadata by-value, constituent datastreams by-reference as
// OpenURLs targeting the owning ARC file's resolver.
//
//   <w:object xmlns:w="urn:xmltape:wrapper:1.0"
//             packageId=".." contentId=".." created="..">
//   <w:metadata>METADATA ELEMENT, VERBATIM</w:metadata>
//   <w:datastream dsId=".." mediaType=".." ref="OPENURL"/>
//   </w:object>

inline constexpr std::string_view kWrapperNsUri = "urn:xmltape:wrapper:1.0";

struct DatastreamRef {
  RepoUri ds_id;
  std::string media_type;
  std::string openurl;
};

struct WrapperDocument {
  RepoUri package_id;
  std::string content_id;
  UtcSeconds created = 0;
  std::string metadata_xml;  // one well-formed element, verbatim
  std::vector<DatastreamRef> datastreams;
};

// Percent-encodes everything outside the RFC 3986 unreserved set.
std::string PercentEncode(std::string_view raw);
std::string PercentDecode(std::string_view encoded);

// Builds the Key/Encoded-Value inline OpenURL referencing one datastream:
//   <arc_base_url>?url_ver=Z39.88-2004&rft_id=<percent-encoded ds id>
// The base must be an absolute HTTP(S) URL.
std::string MakeOpenUrl(std::string_view arc_base_url, const RepoUri& ds_id);

// Serializes / reparses a wrapper. The metadata element must be well-formed
// standalone; parsing returns the metadata bytes verbatim.
std::string WrapperToXml(const WrapperDocument& doc);
WrapperDocument ParseWrapperXml(std::string_view bytes);

}  // namespace tapestore

#endif  // TAPESTORE_WRAPPER_H_
