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

#include <doctest.h>

#include "tapestore/error.h"

using namespace tapestore;

namespace {

constexpr UtcSeconds kT0 = 1754827200;

RepoUri FixedDs() {
  return RepoUri(UriClass::kDatastream,
                 *Uuid::Parse("550e8400-e29b-41d4-a716-446655440000"));
}

}  // namespace

TEST_CASE("openurl follows the Z39.88 KEV inline form") {
  const std::string url = MakeOpenUrl(
      "http://h/openurl/38f2d9c4-0c6a-4b27-9d10-2c7e3a5b8f01", FixedDs());
  CHECK(url ==
        "http://h/openurl/38f2d9c4-0c6a-4b27-9d10-2c7e3a5b8f01"
        "?url_ver=Z39.88-2004&rft_id=info%3Alanl-repo%2Fds%2F"
        "550e8400-e29b-41d4-a716-446655440000");
}

TEST_CASE("rft_id percent-decoding restores the datastream id") {
  const RepoUri ds = RepoUri::Mint(UriClass::kDatastream);
  const std::string url = MakeOpenUrl("http://example.org/openurl/x", ds);
  const std::size_t at = url.find("rft_id=");
  REQUIRE(at != std::string::npos);
  const std::string decoded = PercentDecode(url.substr(at + 7));
  CHECK(decoded == ds.ToString());
}

TEST_CASE("only reserved characters are escaped in a plain ds id") {
  const std::string encoded = PercentEncode(FixedDs().ToString());
  // A minted id contains letters, digits, hyphens, ':' and '/'; of those
  // only ':' and '/' fall outside the unreserved set.
  std::size_t colons = 0;
  std::size_t slashes = 0;
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] != '%') continue;
    const std::string code = encoded.substr(i, 3);
    const bool is_colon = code == "%3A";
    const bool is_slash = code == "%2F";
    CHECK((is_colon || is_slash));
    colons += is_colon;
    slashes += is_slash;
  }
  CHECK(colons == 1);
  CHECK(slashes == 2);
}

TEST_CASE("openurl bases must be absolute http urls") {
  for (const std::string_view base :
       {"", "openurl/x", "/openurl/x", "ftp://h/x", "http://", "http:///x",
        "http://h /x"}) {
    try {
      MakeOpenUrl(base, FixedDs());
      FAIL("expected invalid base for: ", base);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kInvalidBase);
    }
  }
  CHECK_NOTHROW(MakeOpenUrl("https://h:8443/openurl/x", FixedDs()));
}

TEST_CASE("wrapper round trip") {
  WrapperDocument doc{RepoUri::Mint(UriClass::kPackage),
                      "info:doi/10.1234/x<&>",
                      kT0,
                      "<m:meta xmlns:m=\"urn:m\"><m:t>hi</m:t></m:meta>",
                      {}};
  doc.datastreams.push_back(DatastreamRef{
      RepoUri::Mint(UriClass::kDatastream), "application/pdf",
      MakeOpenUrl("http://h/openurl/a", RepoUri::Mint(UriClass::kDatastream))});
  doc.datastreams.push_back(DatastreamRef{
      RepoUri::Mint(UriClass::kDatastream), "image/png",
      MakeOpenUrl("http://h/openurl/b", RepoUri::Mint(UriClass::kDatastream))});

  const std::string xml = WrapperToXml(doc);
  const WrapperDocument parsed = ParseWrapperXml(xml);
  CHECK(parsed.package_id == doc.package_id);
  CHECK(parsed.content_id == doc.content_id);
  CHECK(parsed.created == doc.created);
  CHECK(parsed.metadata_xml == doc.metadata_xml);  // verbatim
  REQUIRE(parsed.datastreams.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(parsed.datastreams[i].ds_id == doc.datastreams[i].ds_id);
    CHECK(parsed.datastreams[i].media_type == doc.datastreams[i].media_type);
    CHECK(parsed.datastreams[i].openurl == doc.datastreams[i].openurl);
  }
}

TEST_CASE("metadata-only wrappers are legal") {
  WrapperDocument doc{RepoUri::Mint(UriClass::kPackage), "info:doi/10.1/y",
                      kT0, "<m:meta xmlns:m=\"urn:m\"/>", {}};
  const WrapperDocument parsed = ParseWrapperXml(WrapperToXml(doc));
  CHECK(parsed.datastreams.empty());
  CHECK(parsed.metadata_xml == doc.metadata_xml);
}

TEST_CASE("malformed metadata is a payload error") {
  WrapperDocument doc{RepoUri::Mint(UriClass::kPackage), "info:doi/10.1/z",
                      kT0, "<broken", {}};
  try {
    WrapperToXml(doc);
    FAIL("expected payload error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kPayloadError);
  }
}

TEST_CASE("wrapper parsing rejects structural damage") {
  WrapperDocument doc{RepoUri::Mint(UriClass::kPackage), "info:doi/10.1/w",
                      kT0, "<m:meta xmlns:m=\"urn:m\"/>", {}};
  const std::string xml = WrapperToXml(doc);

  SUBCASE("wrong namespace") {
    CHECK_THROWS_AS(ParseWrapperXml("<object xmlns=\"urn:other\"/>"), Error);
  }
  SUBCASE("missing attributes") {
    CHECK_THROWS_AS(
        ParseWrapperXml("<w:object xmlns:w=\"urn:xmltape:wrapper:1.0\"/>"),
        Error);
  }
  SUBCASE("unparsed garbage") {
    try {
      ParseWrapperXml(xml.substr(0, xml.size() - 3));
      FAIL("expected payload error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kPayloadError);
    }
  }
}

TEST_CASE("metadata inherits no namespace from the wrapper envelope") {
  // An unprefixed metadata element stays in no namespace both standalone
  // and embedded, because the wrapper vocabulary uses a bound prefix.
  WrapperDocument doc{RepoUri::Mint(UriClass::kPackage), "info:doi/10.1/ns",
                      kT0, "<meta xmlns=\"\"><child/></meta>", {}};
  const std::string xml = WrapperToXml(doc);
  const WrapperDocument parsed = ParseWrapperXml(xml);
  CHECK(parsed.metadata_xml == "<meta xmlns=\"\"><child/></meta>");
}
