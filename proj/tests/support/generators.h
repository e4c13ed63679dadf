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

#ifndef TAPESTORE_TESTS_SUPPORT_GENERATORS_H_
#define TAPESTORE_TESTS_SUPPORT_GENERATORS_H_

#include <cstdint>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "tapestore/ingest.h"

namespace test_support {

inline std::vector<std::uint8_t> RandomBytes(std::mt19937_64& rng,
                                             std::size_t size) {
  std::vector<std::uint8_t> out(size);
  std::size_t i = 0;
  while (i + 8 <= size) {
    const std::uint64_t v = rng();
    std::memcpy(out.data() + i, &v, 8);
    i += 8;
  }
  for (; i < size; ++i) {
    out[i] = static_cast<std::uint8_t>(rng());
  }
  return out;
}

inline std::string RandomToken(std::mt19937_64& rng, std::size_t length) {
  static const char kAlphabet[] =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::string out;
  out.reserve(length);
  std::uniform_int_distribution<std::size_t> pick(0, sizeof(kAlphabet) - 2);
  for (std::size_t i = 0; i < length; ++i) out.push_back(kAlphabet[pick(rng)]);
  return out;
}

// A descriptive-metadata element of roughly `approx_bytes`.
inline std::string MetadataElement(std::mt19937_64& rng,
                                   std::size_t approx_bytes = 256) {
  std::string body;
  while (body.size() < approx_bytes) {
    body += "<d:field name=\"" + RandomToken(rng, 8) + "\">" +
            RandomToken(rng, 24) + "</d:field>";
  }
  return "<d:meta xmlns:d=\"urn:example:meta\"><d:title>" +
         RandomToken(rng, 16) + "</d:title>" + body + "</d:meta>";
}

// Arbitrary namespace-qualified payload trees: nested elements with fresh
// namespace declarations, attributes, text with characters that need
// escaping, CDATA sections and comments. Shapes the tape scanner has to
// track byte-exactly.
inline std::string RandomPayloadContent(std::mt19937_64& rng, int depth) {
  std::string out;
  const int parts = 1 + static_cast<int>(rng() % 4);
  for (int i = 0; i < parts; ++i) {
    switch (rng() % 6) {
      case 0:
        out += "text&amp;more&lt;" + RandomToken(rng, 5) + "&gt;";
        break;
      case 1:
        out += "<![CDATA[raw " + RandomToken(rng, 6) + " </fake> ]]" ">";
        break;
      case 2:
        out += "<!-- hidden </t:tapeRecord> " + RandomToken(rng, 4) + " -->";
        break;
      case 3:
        out += RandomToken(rng, 8);
        break;
      default:
        if (depth < 4) {
          const std::string prefix = "p" + std::to_string(rng() % 3);
          out += "<" + prefix + ":e xmlns:" + prefix + "=\"urn:gen:" +
                 std::to_string(rng() % 10) + "\" a=\"" +
                 RandomToken(rng, 4) + "&quot;\">" +
                 RandomPayloadContent(rng, depth + 1) + "</" + prefix +
                 ":e>";
        } else {
          out += RandomToken(rng, 3);
        }
    }
  }
  return out;
}

inline std::string RandomPayload(std::mt19937_64& rng) {
  return "<g:payload xmlns:g=\"urn:gen:root\">" +
         RandomPayloadContent(rng, 0) + "</g:payload>";
}

inline tapestore::SubmissionObject RandomObject(std::mt19937_64& rng,
                                                std::size_t index,
                                                std::size_t datastreams,
                                                std::size_t bytes_per_stream) {
  tapestore::SubmissionObject object;
  object.content_id =
      "info:doi/10.9999/test." + std::to_string(index) + "." +
      RandomToken(rng, 6);
  object.metadata_xml = MetadataElement(rng);
  for (std::size_t i = 0; i < datastreams; ++i) {
    tapestore::Datastream ds;
    ds.media_type = i % 2 == 0 ? "application/octet-stream" : "image/png";
    ds.data = RandomBytes(rng, bytes_per_stream);
    object.datastreams.push_back(std::move(ds));
  }
  return object;
}

}  // namespace test_support

#endif  // TAPESTORE_TESTS_SUPPORT_GENERATORS_H_
