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

// Operator command line: ingestion, validation, recovery and serving.
//
// Exit codes: 0 success, 1 validation/lookup failure, 2 usage error,
// 3 I/O error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tapestore/arc_file.h"
#include "tapestore/error.h"
#include "tapestore/http_service.h"
#include "tapestore/index.h"
#include "tapestore/ingest.h"
#include "tapestore/locator.h"
#include "tapestore/store.h"
#include "tapestore/xmltape.h"

namespace {

using tapestore::Errc;
using tapestore::Error;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

int ExitCodeFor(const Error& e) {
  switch (e.code()) {
    case Errc::kInvalidArgument:
    case Errc::kInvalidClass:
    case Errc::kInvalidRange:
    case Errc::kInvalidBase:
    case Errc::kMalformedIdentifier:
      return kExitUsage;
    case Errc::kIoError:
      return kExitIo;
    default:
      return kExitFailure;
  }
}

// Settings assembled from (in increasing precedence) defaults, the config
// file, command-line flags, then TAPESTORE_HOST / TAPESTORE_PORT.
struct Settings {
  std::string store = ".";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::uint64_t page_size = 500;
  std::uint64_t max_arc_bytes = 500ull << 20;
  std::string metadata_prefix = "didl";
  std::string admin_email = "admin@localhost";
  std::string oai_base_template;
  std::string openurl_base_template;
  bool strict_openurl = false;
};

std::string Trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && (s[begin] == ' ' || s[begin] == '\t')) ++begin;
  while (end > begin &&
         (s[end - 1] == ' ' || s[end - 1] == '\t' || s[end - 1] == '\r')) {
    --end;
  }
  return s.substr(begin, end - begin);
}

void ParseConfigEntry(const std::string& path, int lineno,
                      const std::string& key, const std::string& value,
                      Settings* settings) {
  if (key == "store") {
    settings->store = value;
  } else if (key == "host") {
    settings->host = value;
  } else if (key == "port") {
    settings->port = std::stoi(value);
  } else if (key == "page_size") {
    settings->page_size = std::stoull(value);
  } else if (key == "max_arc_bytes") {
    settings->max_arc_bytes = std::stoull(value);
  } else if (key == "metadata_prefix") {
    settings->metadata_prefix = value;
  } else if (key == "admin_email") {
    settings->admin_email = value;
  } else if (key == "oai_base_template") {
    settings->oai_base_template = value;
  } else if (key == "openurl_base_template") {
    settings->openurl_base_template = value;
  } else if (key == "strict_openurl") {
    settings->strict_openurl = value == "true" || value == "1";
  } else {
    throw Error(Errc::kInvalidArgument,
                path + ":" + std::to_string(lineno) + ": unknown key '" +
                    key + "'");
  }
}

void LoadConfigFile(const std::string& path, Settings* settings) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::kIoError, "cannot open config file " + path);
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::kInvalidArgument,
                  path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = Trim(trimmed.substr(0, eq));
    const std::string value = Trim(trimmed.substr(eq + 1));
    try {
      ParseConfigEntry(path, lineno, key, value, settings);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(Errc::kInvalidArgument,
                  path + ":" + std::to_string(lineno) + ": bad value for '" +
                      key + "'");
    }
  }
}

void ApplyEnvironment(Settings* settings) {
  if (const char* host = std::getenv("TAPESTORE_HOST")) {
    settings->host = host;
  }
  if (const char* port = std::getenv("TAPESTORE_PORT")) {
    settings->port = std::atoi(port);
  }
}

// Default templates point at the configured serve address.
void FillTemplateDefaults(Settings* settings) {
  const std::string authority =
      "http://" + settings->host + ":" + std::to_string(settings->port);
  if (settings->oai_base_template.empty()) {
    settings->oai_base_template = authority + "/oai/{uuid}";
  }
  if (settings->openurl_base_template.empty()) {
    settings->openurl_base_template = authority + "/openurl/{uuid}";
  }
}

// Accepts either a full repo URI of the given class or a bare UUID.
tapestore::Uuid UuidArgument(const std::string& arg, tapestore::UriClass cls) {
  if (const auto uuid = tapestore::Uuid::Parse(arg)) return *uuid;
  const tapestore::RepoUri uri = tapestore::RepoUri::Parse(arg);
  if (uri.cls() != cls) {
    throw Error(Errc::kInvalidClass,
                "identifier is of class " +
                    std::string(tapestore::UriClassName(uri.cls())) +
                    ", expected " +
                    std::string(tapestore::UriClassName(cls)));
  }
  return uri.uuid();
}

void WriteRawToStdout(std::string_view bytes) {
  std::fwrite(bytes.data(), 1, bytes.size(), stdout);
  std::fflush(stdout);
}

int CmdIngest(const Settings& settings, const std::string& batch_dir) {
  tapestore::DirectoryBatchSource source(batch_dir);
  tapestore::IngestConfig config;
  config.max_arc_bytes = settings.max_arc_bytes;
  config.oai_base_template = settings.oai_base_template;
  config.openurl_base_template = settings.openurl_base_template;
  config.extra_provenance.emplace_back(
      "batch", std::filesystem::path(batch_dir).filename().string());
  const tapestore::StoreLayout store{std::filesystem::path(settings.store)};
  const tapestore::IngestReport report =
      tapestore::IngestBatch(source, store, config);
  WriteRawToStdout(tapestore::SerializeManifest(report));
  return kExitOk;
}

bool LooksLikeTape(const std::filesystem::path& path) {
  return path.extension() == tapestore::kTapeExtension;
}

bool LooksLikeArc(const std::filesystem::path& path) {
  return path.extension() == tapestore::kArcExtension;
}

// Verifies a sidecar index against its target when the sidecar exists.
void CheckSidecar(const std::filesystem::path& index_path,
                  const std::filesystem::path& target,
                  tapestore::IndexOrder order, std::vector<std::string>* out) {
  if (!std::filesystem::exists(index_path)) return;
  try {
    tapestore::Index::Load(index_path, target, order);
  } catch (const Error& e) {
    out->push_back(std::string("index\t-\t") + e.what());
  }
}

int CmdValidate(const std::string& target) {
  const std::filesystem::path path(target);
  if (!std::filesystem::exists(path)) {
    throw Error(Errc::kIoError, "no such file: " + target);
  }
  std::vector<std::string> findings;
  std::uint64_t records = 0;
  std::string type;
  if (LooksLikeTape(path)) {
    type = "tape";
    const tapestore::ValidationReport report = tapestore::ValidateTape(path);
    records = report.scan_record_count;
    for (const auto& finding : report.findings) {
      std::string line = finding.code + "\t";
      line += finding.record_ordinal
                  ? std::to_string(*finding.record_ordinal)
                  : std::string("-");
      line += "\t" + finding.detail;
      findings.push_back(std::move(line));
    }
    CheckSidecar(tapestore::IdIndexPathFor(path), path,
                 tapestore::IndexOrder::kById, &findings);
    CheckSidecar(tapestore::DtIndexPathFor(path), path,
                 tapestore::IndexOrder::kByDatetime, &findings);
  } else if (LooksLikeArc(path)) {
    type = "arc";
    try {
      records = tapestore::ScanArc(path).size() - 1;
    } catch (const Error& e) {
      std::string line = "structure\t-\t";
      line += e.what();
      findings.push_back(std::move(line));
    }
    CheckSidecar(tapestore::IdIndexPathFor(path), path,
                 tapestore::IndexOrder::kById, &findings);
  } else {
    throw Error(Errc::kInvalidArgument,
                "expected a .xmltape or .arc file: " + target);
  }
  std::cout << "target\t" << path.string() << "\n";
  std::cout << "type\t" << type << "\n";
  std::cout << "records\t" << records << "\n";
  for (const std::string& finding : findings) {
    std::cout << "finding\t" << finding << "\n";
  }
  return findings.empty() ? kExitOk : kExitFailure;
}

int CmdReindex(const std::string& target) {
  const std::filesystem::path path(target);
  if (!std::filesystem::exists(path)) {
    throw Error(Errc::kIoError, "no such file: " + target);
  }
  if (LooksLikeTape(path)) {
    const tapestore::TapeIndexPaths paths = tapestore::BuildTapeIndexes(path);
    std::cout << "index\t" << paths.id.string() << "\n";
    std::cout << "index\t" << paths.dt.string() << "\n";
  } else if (LooksLikeArc(path)) {
    const std::filesystem::path index = tapestore::BuildArcIndex(path);
    std::cout << "index\t" << index.string() << "\n";
  } else {
    throw Error(Errc::kInvalidArgument,
                "expected a .xmltape or .arc file: " + target);
  }
  return kExitOk;
}

int CmdServe(const Settings& settings) {
  tapestore::ServiceConfig config;
  config.store_root = settings.store;
  config.host = settings.host;
  config.port = settings.port;
  config.oai.page_size = settings.page_size;
  config.oai.metadata_prefix = settings.metadata_prefix;
  config.oai.admin_email = settings.admin_email;
  config.oai_base_template = settings.oai_base_template;
  config.strict_openurl = settings.strict_openurl;
  tapestore::Service service(std::move(config));
  if (!service.Bind()) {
    throw Error(Errc::kIoError, "cannot bind " + settings.host + ":" +
                                    std::to_string(settings.port));
  }
  const tapestore::Service::MountStats stats = service.Mount();
  std::cerr << "tapestore: mounted " << stats.tapes << " tape(s), "
            << stats.arcs << " ARC file(s)";
  if (stats.skipped > 0) std::cerr << ", skipped " << stats.skipped;
  std::cerr << "\ntapestore: listening on " << settings.host << ":"
            << service.bound_port() << "\n";
  service.ListenAfterBind();
  return kExitOk;
}

int CmdGetRecord(const Settings& settings, const std::string& tape_arg,
                 const std::string& package_arg) {
  const tapestore::StoreLayout store{std::filesystem::path(settings.store)};
  const tapestore::Uuid tape_uuid =
      UuidArgument(tape_arg, tapestore::UriClass::kTape);
  const std::filesystem::path tape_path = store.TapePath(tape_uuid);
  if (!std::filesystem::exists(tape_path)) {
    throw Error(Errc::kNotFound, "tape not in store: " + tape_arg);
  }
  std::string key = package_arg;
  if (const auto uuid = tapestore::Uuid::Parse(package_arg)) {
    key = tapestore::RepoUri(tapestore::UriClass::kPackage, *uuid).ToString();
  }
  const tapestore::Index index = tapestore::Index::Load(
      tapestore::IdIndexPathFor(tape_path), tape_path,
      tapestore::IndexOrder::kById);
  const tapestore::IndexEntry* entry = index.LookupId(key);
  if (entry == nullptr) {
    throw Error(Errc::kNotFound, "no record with identifier " + key);
  }
  const tapestore::TapeRecord record =
      tapestore::ReadRecordAt(tape_path, entry->extent);
  WriteRawToStdout(record.payload);
  return kExitOk;
}

int CmdGetDatastream(const Settings& settings, const std::string& arc_arg,
                     const std::string& ds_arg) {
  const tapestore::StoreLayout store{std::filesystem::path(settings.store)};
  const tapestore::Uuid arc_uuid =
      UuidArgument(arc_arg, tapestore::UriClass::kArc);
  const std::filesystem::path arc_path = store.ArcPath(arc_uuid);
  if (!std::filesystem::exists(arc_path)) {
    throw Error(Errc::kNotFound, "ARC file not in store: " + arc_arg);
  }
  std::string key = ds_arg;
  if (const auto uuid = tapestore::Uuid::Parse(ds_arg)) {
    key =
        tapestore::RepoUri(tapestore::UriClass::kDatastream, *uuid).ToString();
  }
  const tapestore::Index index = tapestore::Index::Load(
      tapestore::IdIndexPathFor(arc_path), arc_path,
      tapestore::IndexOrder::kById);
  const tapestore::IndexEntry* entry = index.LookupId(key);
  if (entry == nullptr) {
    throw Error(Errc::kNotFound, "no datastream with identifier " + key);
  }
  const auto [header, data] = tapestore::ReadArcRecord(arc_path, entry->extent);
  WriteRawToStdout(
      std::string_view(reinterpret_cast<const char*>(data.data()),
                       data.size()));
  return kExitOk;
}

int CmdLocate(const Settings& settings, const std::string& content_id) {
  const tapestore::StoreLayout store{std::filesystem::path(settings.store)};
  if (!std::filesystem::exists(store.locator_log())) {
    throw Error(Errc::kNotFound, "store has no locator log");
  }
  const tapestore::Locator locator =
      tapestore::Locator::Open(store.locator_log());
  const auto versions =
      locator.Resolve(content_id, settings.oai_base_template);
  std::string out;
  for (const tapestore::ResolvedVersion& version : versions) {
    out += version.package_id + "\t" + version.oai_base_url + "\t" +
           tapestore::FormatIso(version.created) + "\n";
  }
  WriteRawToStdout(out);
  return versions.empty() ? kExitFailure : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tapestore: write-once XMLtape/ARC archival storage"};
  app.require_subcommand(1);
  // Global flags may appear before or after the subcommand.
  app.fallthrough();

  std::string config_file;
  std::optional<std::string> flag_store;
  std::optional<std::string> flag_host;
  std::optional<int> flag_port;
  std::optional<std::uint64_t> flag_page_size;
  std::optional<std::uint64_t> flag_max_arc_bytes;
  std::optional<std::string> flag_oai_template;
  std::optional<std::string> flag_openurl_template;

  app.add_option("--config", config_file, "Configuration file");
  app.add_option("--store", flag_store, "Store root directory");
  app.add_option("--host", flag_host, "Bind address");
  app.add_option("--port", flag_port, "TCP port");
  app.add_option("--page-size", flag_page_size, "OAI-PMH list page size");
  app.add_option("--max-arc-bytes", flag_max_arc_bytes,
                 "ARC rollover threshold in bytes");
  app.add_option("--oai-template", flag_oai_template,
                 "OAI-PMH base URL template ({uuid} placeholder)");
  app.add_option("--openurl-template", flag_openurl_template,
                 "OpenURL base URL template ({uuid} placeholder)");

  std::string batch_dir;
  CLI::App* ingest = app.add_subcommand("ingest", "Ingest a batch directory");
  ingest->add_option("batch", batch_dir, "Batch directory")->required();

  std::string validate_target;
  CLI::App* validate =
      app.add_subcommand("validate", "Validate a tape or ARC file");
  validate->add_option("path", validate_target, "File to validate")
      ->required();

  std::string reindex_target;
  CLI::App* reindex =
      app.add_subcommand("reindex", "Rebuild indexes for a tape or ARC file");
  reindex->add_option("path", reindex_target, "File to reindex")->required();

  CLI::App* serve = app.add_subcommand("serve", "Serve the store over HTTP");

  std::string tape_arg, package_arg;
  CLI::App* get_record =
      app.add_subcommand("get-record", "Print one record payload");
  get_record->add_option("tape", tape_arg, "Tape identifier or UUID")
      ->required();
  get_record->add_option("record", package_arg, "Record identifier")
      ->required();

  std::string arc_arg, ds_arg;
  CLI::App* get_datastream =
      app.add_subcommand("get-datastream", "Print one datastream");
  get_datastream->add_option("arc", arc_arg, "ARC identifier or UUID")
      ->required();
  get_datastream->add_option("datastream", ds_arg, "Datastream identifier")
      ->required();

  std::string content_id;
  CLI::App* locate =
      app.add_subcommand("locate", "List all versions of a Digital Object");
  locate->add_option("content-id", content_id, "Content identifier")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    Settings settings;
    if (!config_file.empty()) LoadConfigFile(config_file, &settings);
    if (flag_store) settings.store = *flag_store;
    if (flag_host) settings.host = *flag_host;
    if (flag_port) settings.port = *flag_port;
    if (flag_page_size) settings.page_size = *flag_page_size;
    if (flag_max_arc_bytes) settings.max_arc_bytes = *flag_max_arc_bytes;
    if (flag_oai_template) settings.oai_base_template = *flag_oai_template;
    if (flag_openurl_template) {
      settings.openurl_base_template = *flag_openurl_template;
    }
    ApplyEnvironment(&settings);
    FillTemplateDefaults(&settings);

    if (ingest->parsed()) return CmdIngest(settings, batch_dir);
    if (validate->parsed()) return CmdValidate(validate_target);
    if (reindex->parsed()) return CmdReindex(reindex_target);
    if (serve->parsed()) return CmdServe(settings);
    if (get_record->parsed()) {
      return CmdGetRecord(settings, tape_arg, package_arg);
    }
    if (get_datastream->parsed()) {
      return CmdGetDatastream(settings, arc_arg, ds_arg);
    }
    if (locate->parsed()) return CmdLocate(settings, content_id);
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "tapestore: " << e.what() << "\n";
    return ExitCodeFor(e);
  } catch (const std::exception& e) {
    std::cerr << "tapestore: " << e.what() << "\n";
    return kExitIo;
  }
}
