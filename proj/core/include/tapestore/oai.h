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

#ifndef TAPESTORE_OAI_H_
#define TAPESTORE_OAI_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tapestore/identifier.h"
#include "tapestore/index.h"

namespace tapestore {

struct OaiConfig {
  std::string metadata_prefix = "didl";  // the single supported format
  std::uint64_t page_size = 500;
  std::string admin_email = "admin@localhost";
};

// Query parameters in request order, URL-decoded. Order and duplicates
// matter for protocol error handling.
using OaiParams = std::vector<std::pair<std::string, std::string>>;

// One sealed tape exposed as an autonomous OAI-PMH 2.0 repository:
// identifiers are the record identifiers (Package Identifiers), datestamps
// are the record creation datetimes, granularity is seconds, and the only
// metadata format is the configured payload prefix. Requests are stateless;
// resumption tokens are self-describing and carry a tape hash prefix so a
// remounted different tape invalidates them.
class TapeRepository {
 public:
  TapeRepository(RepoUri tape_id, std::filesystem::path tape_path,
                 Index id_index, Index dt_index, std::string base_url,
                 OaiConfig config);

  // Handles one protocol request and returns the complete response
  // document. Protocol failures are in-band <error> responses.
  std::string Handle(const OaiParams& params) const;

  const RepoUri& tape_id() const { return tape_id_; }
  const std::string& base_url() const { return base_url_; }
  const Index& id_index() const { return id_index_; }
  const Index& dt_index() const { return dt_index_; }
  const std::filesystem::path& tape_path() const { return tape_path_; }

 private:
  struct ListContext;

  std::string Envelope(std::string_view request_attrs,
                       std::string_view body) const;
  std::string ErrorResponse(const OaiParams& params, std::string_view code,
                            std::string_view message,
                            bool echo_attributes) const;
  std::string HandleIdentify() const;
  std::string HandleListMetadataFormats(const OaiParams& params) const;
  std::string HandleGetRecord(const OaiParams& params) const;
  std::string HandleList(const OaiParams& params, bool with_metadata) const;

  std::string MakeToken(const ListContext& context,
                        std::uint64_t next_cursor) const;
  bool ParseToken(std::string_view token, ListContext* context) const;

  RepoUri tape_id_;
  std::filesystem::path tape_path_;
  Index id_index_;
  Index dt_index_;
  std::string base_url_;
  OaiConfig config_;
  std::string tape_hash16_;  // first 16 hex digits of the tape hash
};

}  // namespace tapestore

#endif  // TAPESTORE_OAI_H_
