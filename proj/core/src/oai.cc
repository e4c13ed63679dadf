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

#include "tapestore/oai.h"

#include <algorithm>
#include <fstream>
#include <optional>

#include "tapestore/error.h"
#include "tapestore/xml.h"
#include "tapestore/xmltape.h"

namespace tapestore {

namespace {

constexpr std::string_view kOaiNs = "http://www.openarchives.org/OAI/2.0/";

const char kBase64Url[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

std::string Base64UrlEncode(std::string_view raw) {
  std::string out;
  out.reserve((raw.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 2 < raw.size()) {
    const std::uint32_t v = (static_cast<unsigned char>(raw[i]) << 16) |
                            (static_cast<unsigned char>(raw[i + 1]) << 8) |
                            static_cast<unsigned char>(raw[i + 2]);
    out.push_back(kBase64Url[(v >> 18) & 63]);
    out.push_back(kBase64Url[(v >> 12) & 63]);
    out.push_back(kBase64Url[(v >> 6) & 63]);
    out.push_back(kBase64Url[v & 63]);
    i += 3;
  }
  const std::size_t rest = raw.size() - i;
  if (rest == 1) {
    const std::uint32_t v = static_cast<unsigned char>(raw[i]) << 16;
    out.push_back(kBase64Url[(v >> 18) & 63]);
    out.push_back(kBase64Url[(v >> 12) & 63]);
  } else if (rest == 2) {
    const std::uint32_t v = (static_cast<unsigned char>(raw[i]) << 16) |
                            (static_cast<unsigned char>(raw[i + 1]) << 8);
    out.push_back(kBase64Url[(v >> 18) & 63]);
    out.push_back(kBase64Url[(v >> 12) & 63]);
    out.push_back(kBase64Url[(v >> 6) & 63]);
  }
  return out;
}

std::optional<std::string> Base64UrlDecode(std::string_view encoded) {
  int table[256];
  std::fill(std::begin(table), std::end(table), -1);
  for (int i = 0; i < 64; ++i) {
    table[static_cast<unsigned char>(kBase64Url[i])] = i;
  }
  std::string out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (const char c : encoded) {
    const int v = table[static_cast<unsigned char>(c)];
    if (v < 0) return std::nullopt;
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((acc >> bits) & 0xff));
    }
  }
  return out;
}

// OAI-PMH datestamp argument: seconds form, or day form expanded to the
// bound-appropriate instant.
std::optional<UtcSeconds> ParseOaiDate(std::string_view s, bool is_until,
                                       bool* day_granularity) {
  if (const auto t = ParseIso(s)) {
    *day_granularity = false;
    return t;
  }
  if (const auto t = ParseIsoDate(s)) {
    *day_granularity = true;
    return is_until ? *t + 86399 : *t;
  }
  return std::nullopt;
}

const std::string* FindParam(const OaiParams& params, std::string_view name) {
  for (const auto& [key, value] : params) {
    if (key == name) return &value;
  }
  return nullptr;
}

bool HasDuplicateParams(const OaiParams& params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (std::size_t j = i + 1; j < params.size(); ++j) {
      if (params[i].first == params[j].first) return true;
    }
  }
  return false;
}

bool ParamsWithin(const OaiParams& params,
                  std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : params) {
    if (key == "verb") continue;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      return false;
    }
  }
  return true;
}

std::string EchoAttrs(const OaiParams& params) {
  static constexpr std::string_view kEchoable[] = {
      "verb", "identifier", "metadataPrefix", "from",
      "until", "set",       "resumptionToken"};
  std::string out;
  for (const auto& [key, value] : params) {
    if (std::find(std::begin(kEchoable), std::end(kEchoable), key) ==
        std::end(kEchoable)) {
      continue;
    }
    out += " " + key + "=\"" + xml::EscapeAttr(value) + "\"";
  }
  return out;
}

std::string HeaderXml(const IndexEntry& entry) {
  return "<oai:header>\n<oai:identifier>" + xml::EscapeText(entry.key) +
         "</oai:identifier>\n<oai:datestamp>" + FormatIso(entry.datestamp) +
         "</oai:datestamp>\n</oai:header>\n";
}

std::optional<std::uint64_t> ParseU64Field(std::string_view s) {
  if (s.empty() || (s.size() > 1 && s[0] == '0')) return std::nullopt;
  std::uint64_t v = 0;
  for (const char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

}  // namespace

// Bounds and cursor of one paged list request.
struct TapeRepository::ListContext {
  std::optional<UtcSeconds> from;
  std::optional<UtcSeconds> until;
  std::uint64_t cursor = 0;
};

TapeRepository::TapeRepository(RepoUri tape_id, std::filesystem::path tape_path,
                               Index id_index, Index dt_index,
                               std::string base_url, OaiConfig config)
    : tape_id_(std::move(tape_id)),
      tape_path_(std::move(tape_path)),
      id_index_(std::move(id_index)),
      dt_index_(std::move(dt_index)),
      base_url_(std::move(base_url)),
      config_(std::move(config)) {
  tape_hash16_ = id_index_.target_sha256().substr(0, 16);
}

std::string TapeRepository::Envelope(std::string_view request_attrs,
                                     std::string_view body) const {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out +=
      "<oai:OAI-PMH xmlns:oai=\"http://www.openarchives.org/OAI/2.0/\" "
      "xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" "
      "xsi:schemaLocation=\"http://www.openarchives.org/OAI/2.0/ "
      "http://www.openarchives.org/OAI/2.0/OAI-PMH.xsd\">\n";
  out += "<oai:responseDate>" + FormatIso(NowUtcSeconds()) +
         "</oai:responseDate>\n";
  out += "<oai:request";
  out += request_attrs;
  out += ">" + xml::EscapeText(base_url_) + "</oai:request>\n";
  out += body;
  out += "</oai:OAI-PMH>\n";
  return out;
}

std::string TapeRepository::ErrorResponse(const OaiParams& params,
                                          std::string_view code,
                                          std::string_view message,
                                          bool echo_attributes) const {
  std::string body = "<oai:error code=\"";
  body += code;
  body += "\">";
  body += xml::EscapeText(message);
  body += "</oai:error>\n";
  return Envelope(echo_attributes ? EchoAttrs(params) : std::string(), body);
}

std::string TapeRepository::Handle(const OaiParams& params) const {
  const std::string* verb = FindParam(params, "verb");
  if (verb == nullptr) {
    return ErrorResponse(params, "badVerb", "request has no verb", false);
  }
  if (HasDuplicateParams(params)) {
    return ErrorResponse(params, "badArgument", "repeated argument", false);
  }

  if (*verb == "Identify") {
    if (!ParamsWithin(params, {})) {
      return ErrorResponse(params, "badArgument",
                           "Identify accepts no arguments", false);
    }
    return HandleIdentify();
  }
  if (*verb == "ListMetadataFormats") {
    if (!ParamsWithin(params, {"identifier"})) {
      return ErrorResponse(params, "badArgument", "illegal argument", false);
    }
    return HandleListMetadataFormats(params);
  }
  if (*verb == "GetRecord") {
    if (!ParamsWithin(params, {"identifier", "metadataPrefix"})) {
      return ErrorResponse(params, "badArgument", "illegal argument", false);
    }
    return HandleGetRecord(params);
  }
  if (*verb == "ListRecords" || *verb == "ListIdentifiers") {
    if (!ParamsWithin(params, {"from", "until", "metadataPrefix", "set",
                               "resumptionToken"})) {
      return ErrorResponse(params, "badArgument", "illegal argument", false);
    }
    return HandleList(params, *verb == "ListRecords");
  }
  if (*verb == "ListSets") {
    return ErrorResponse(params, "noSetHierarchy",
                         "this repository has no set hierarchy", true);
  }
  return ErrorResponse(params, "badVerb", "unknown verb '" + *verb + "'",
                       false);
}

std::string TapeRepository::HandleIdentify() const {
  const auto& entries = dt_index_.entries();
  const std::string earliest =
      entries.empty() ? "1970-01-01T00:00:00Z"
                      : FormatIso(entries.front().datestamp);
  std::string body = "<oai:Identify>\n";
  body += "<oai:repositoryName>XMLtape " + tape_id_.uuid().ToString() +
          "</oai:repositoryName>\n";
  body += "<oai:baseURL>" + xml::EscapeText(base_url_) + "</oai:baseURL>\n";
  body += "<oai:protocolVersion>2.0</oai:protocolVersion>\n";
  body += "<oai:adminEmail>" + xml::EscapeText(config_.admin_email) +
          "</oai:adminEmail>\n";
  body += "<oai:earliestDatestamp>" + earliest + "</oai:earliestDatestamp>\n";
  body += "<oai:deletedRecord>no</oai:deletedRecord>\n";
  body += "<oai:granularity>YYYY-MM-DDThh:mm:ssZ</oai:granularity>\n";
  body += "</oai:Identify>\n";
  return Envelope(" verb=\"Identify\"", body);
}

std::string TapeRepository::HandleListMetadataFormats(
    const OaiParams& params) const {
  if (const std::string* identifier = FindParam(params, "identifier")) {
    if (id_index_.LookupId(*identifier) == nullptr) {
      return ErrorResponse(params, "idDoesNotExist",
                           "no record with identifier '" + *identifier + "'",
                           true);
    }
  }
  std::string body = "<oai:ListMetadataFormats>\n<oai:metadataFormat>\n";
  body += "<oai:metadataPrefix>" + xml::EscapeText(config_.metadata_prefix) +
          "</oai:metadataPrefix>\n";
  body += "<oai:schema>urn:xmltape:wrapper:1.0</oai:schema>\n";
  body +=
      "<oai:metadataNamespace>urn:xmltape:wrapper:1.0"
      "</oai:metadataNamespace>\n";
  body += "</oai:metadataFormat>\n</oai:ListMetadataFormats>\n";
  return Envelope(EchoAttrs(params), body);
}

std::string TapeRepository::HandleGetRecord(const OaiParams& params) const {
  const std::string* identifier = FindParam(params, "identifier");
  const std::string* prefix = FindParam(params, "metadataPrefix");
  if (identifier == nullptr || prefix == nullptr) {
    return ErrorResponse(params, "badArgument",
                         "GetRecord requires identifier and metadataPrefix",
                         false);
  }
  if (*prefix != config_.metadata_prefix) {
    return ErrorResponse(params, "cannotDisseminateFormat",
                         "unsupported metadataPrefix '" + *prefix + "'", true);
  }
  const IndexEntry* entry = id_index_.LookupId(*identifier);
  if (entry == nullptr) {
    return ErrorResponse(params, "idDoesNotExist",
                         "no record with identifier '" + *identifier + "'",
                         true);
  }
  const TapeRecord record = ReadRecordAt(tape_path_, entry->extent);
  std::string body = "<oai:GetRecord>\n<oai:record>\n";
  body += HeaderXml(*entry);
  body += "<oai:metadata>" + record.payload + "</oai:metadata>\n";
  body += "</oai:record>\n</oai:GetRecord>\n";
  return Envelope(EchoAttrs(params), body);
}

std::string TapeRepository::MakeToken(const ListContext& context,
                                      std::uint64_t next_cursor) const {
  std::string raw = "1!";
  raw += tape_id_.uuid().ToString();
  raw += '!';
  raw += context.from ? std::to_string(*context.from) : "-";
  raw += '!';
  raw += context.until ? std::to_string(*context.until) : "-";
  raw += '!';
  raw += std::to_string(next_cursor);
  raw += '!';
  raw += tape_hash16_;
  return Base64UrlEncode(raw);
}

bool TapeRepository::ParseToken(std::string_view token,
                                ListContext* context) const {
  const auto decoded = Base64UrlDecode(token);
  if (!decoded) return false;
  std::vector<std::string_view> fields;
  std::string_view rest(*decoded);
  while (true) {
    const std::size_t bang = rest.find('!');
    if (bang == std::string_view::npos) {
      fields.push_back(rest);
      break;
    }
    fields.push_back(rest.substr(0, bang));
    rest.remove_prefix(bang + 1);
  }
  if (fields.size() != 6 || fields[0] != "1") return false;
  if (fields[1] != tape_id_.uuid().ToString()) return false;
  if (fields[5] != tape_hash16_) return false;
  auto parse_bound = [](std::string_view s,
                        std::optional<UtcSeconds>* out) -> bool {
    if (s == "-") {
      out->reset();
      return true;
    }
    // Bounds are stored as decimal epoch seconds (possibly negative).
    bool negative = false;
    if (!s.empty() && s[0] == '-') {
      negative = true;
      s.remove_prefix(1);
    }
    const auto v = ParseU64Field(s);
    if (!v) return false;
    *out = negative ? -static_cast<UtcSeconds>(*v)
                    : static_cast<UtcSeconds>(*v);
    return true;
  };
  if (!parse_bound(fields[2], &context->from)) return false;
  if (!parse_bound(fields[3], &context->until)) return false;
  const auto cursor = ParseU64Field(fields[4]);
  if (!cursor) return false;
  context->cursor = *cursor;
  return true;
}

std::string TapeRepository::HandleList(const OaiParams& params,
                                       bool with_metadata) const {
  const char* const list_tag =
      with_metadata ? "oai:ListRecords" : "oai:ListIdentifiers";
  const std::string* token_arg = FindParam(params, "resumptionToken");
  ListContext context;

  if (token_arg != nullptr) {
    // Exclusive argument: nothing else besides the verb may appear.
    if (params.size() != 2) {
      return ErrorResponse(params, "badArgument",
                           "resumptionToken is an exclusive argument", false);
    }
    if (!ParseToken(*token_arg, &context)) {
      return ErrorResponse(params, "badResumptionToken",
                           "invalid or stale resumption token", true);
    }
  } else {
    if (FindParam(params, "set") != nullptr) {
      return ErrorResponse(params, "noSetHierarchy",
                           "this repository has no set hierarchy", true);
    }
    const std::string* prefix = FindParam(params, "metadataPrefix");
    if (prefix == nullptr) {
      return ErrorResponse(params, "badArgument",
                           "metadataPrefix is required", false);
    }
    if (*prefix != config_.metadata_prefix) {
      return ErrorResponse(params, "cannotDisseminateFormat",
                           "unsupported metadataPrefix '" + *prefix + "'",
                           true);
    }
    bool from_day = false;
    bool until_day = false;
    if (const std::string* from = FindParam(params, "from")) {
      const auto t = ParseOaiDate(*from, false, &from_day);
      if (!t) {
        return ErrorResponse(params, "badArgument",
                             "malformed 'from' datestamp", false);
      }
      context.from = *t;
    }
    if (const std::string* until = FindParam(params, "until")) {
      const auto t = ParseOaiDate(*until, true, &until_day);
      if (!t) {
        return ErrorResponse(params, "badArgument",
                             "malformed 'until' datestamp", false);
      }
      context.until = *t;
    }
    if (FindParam(params, "from") != nullptr &&
        FindParam(params, "until") != nullptr && from_day != until_day) {
      return ErrorResponse(params, "badArgument",
                           "from and until use different granularity", false);
    }
    if (context.from && context.until && *context.from > *context.until) {
      return ErrorResponse(params, "badArgument",
                           "from is later than until", false);
    }
  }

  const std::vector<IndexEntry> matches =
      dt_index_.Range(context.from, context.until);
  if (matches.empty()) {
    return ErrorResponse(params, "noRecordsMatch",
                         "no records in the requested range", true);
  }
  if (context.cursor >= matches.size()) {
    return ErrorResponse(params, "badResumptionToken",
                         "token cursor is beyond the list", true);
  }

  const std::uint64_t end = std::min<std::uint64_t>(
      matches.size(), context.cursor + config_.page_size);

  std::string body = "<";
  body += list_tag;
  body += ">\n";
  if (with_metadata) {
    std::ifstream tape(tape_path_, std::ios::binary);
    if (!tape) {
      throw Error(Errc::kIoError, "cannot open " + tape_path_.string());
    }
    for (std::uint64_t i = context.cursor; i < end; ++i) {
      const TapeRecord record = ReadRecordAt(tape, matches[i].extent);
      body += "<oai:record>\n";
      body += HeaderXml(matches[i]);
      body += "<oai:metadata>" + record.payload + "</oai:metadata>\n";
      body += "</oai:record>\n";
    }
  } else {
    for (std::uint64_t i = context.cursor; i < end; ++i) {
      body += HeaderXml(matches[i]);
    }
  }

  const bool paginated = context.cursor > 0 || end < matches.size();
  if (paginated) {
    body += "<oai:resumptionToken completeListSize=\"" +
            std::to_string(matches.size()) + "\" cursor=\"" +
            std::to_string(context.cursor) + "\"";
    if (end < matches.size()) {
      body += ">" + MakeToken(context, end) + "</oai:resumptionToken>\n";
    } else {
      body += "/>\n";  // empty token closes the list
    }
  }
  body += "</";
  body += list_tag;
  body += ">\n";
  return Envelope(EchoAttrs(params), body);
}

}  // namespace tapestore
