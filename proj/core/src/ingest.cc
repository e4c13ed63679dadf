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

#include "tapestore/ingest.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <optional>

#include "tapestore/arc_file.h"
#include "tapestore/error.h"
#include "tapestore/index.h"
#include "tapestore/locator.h"
#include "tapestore/xml.h"
#include "tapestore/xmltape.h"

#ifndef TAPESTORE_VERSION_STRING
#define TAPESTORE_VERSION_STRING "dev"
#endif

namespace tapestore {

namespace {

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::kIoError, "cannot open " + path.string());
  }
  std::string out;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    out.append(buf, static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) {
    throw Error(Errc::kIoError, "read error on " + path.string());
  }
  return out;
}

std::string FirstLineTrimmed(const std::filesystem::path& path) {
  const std::string content = ReadFileBytes(path);
  std::string line = content.substr(0, content.find('\n'));
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ' ||
                           line.back() == '\t')) {
    line.pop_back();
  }
  return line;
}

// Strips an optional BOM, XML declaration and surrounding whitespace so the
// remainder is the bare metadata element.
std::string StripToElement(std::string content) {
  std::size_t begin = 0;
  if (content.size() >= 3 && content.compare(0, 3, "\xef\xbb\xbf") == 0) {
    begin = 3;
  }
  while (begin < content.size() &&
         (content[begin] == ' ' || content[begin] == '\t' ||
          content[begin] == '\n' || content[begin] == '\r')) {
    ++begin;
  }
  if (content.compare(begin, 5, "<?xml") == 0) {
    const std::size_t end = content.find("?>", begin);
    if (end != std::string::npos) begin = end + 2;
  }
  std::size_t finish = content.size();
  while (finish > begin) {
    const char c = content[finish - 1];
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') break;
    --finish;
  }
  while (begin < finish &&
         (content[begin] == ' ' || content[begin] == '\t' ||
          content[begin] == '\n' || content[begin] == '\r')) {
    ++begin;
  }
  return content.substr(begin, finish - begin);
}

bool MediaTypeOk(std::string_view s) {
  if (s.empty()) return false;
  for (const char c : s) {
    if (c <= 0x20 || c >= 0x7f) return false;
  }
  return true;
}

std::uint64_t DecimalDigits(std::uint64_t v) {
  std::uint64_t digits = 1;
  while (v >= 10) {
    v /= 10;
    ++digits;
  }
  return digits;
}

// Exact on-disk footprint of one ARC record including its separator.
std::uint64_t ArcRecordFootprint(const RepoUri& ds_id,
                                 std::string_view media_type,
                                 std::uint64_t data_size) {
  const std::uint64_t header = ds_id.ToString().size() + 1 +
                               kArcLocalIp.size() + 1 + 14 + 1 +
                               media_type.size() + 1 +
                               DecimalDigits(data_size) + 1;
  return header + data_size + 1;
}

struct PendingRecord {
  std::string record_id;
  UtcSeconds created;
  std::string wrapper_xml;
};

struct ArcInProgress {
  RepoUri id;
  std::filesystem::path tmp_path;
  std::filesystem::path final_path;
  std::optional<ArcWriter> writer;
  std::vector<IndexEntry> entries;
};

void RemoveQuietly(const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::remove(path, ec);
}

}  // namespace

DirectoryBatchSource::DirectoryBatchSource(
    const std::filesystem::path& batch_dir) {
  std::error_code ec;
  std::filesystem::directory_iterator it(batch_dir, ec);
  if (ec) {
    throw Error(Errc::kIoError,
                "cannot read batch directory " + batch_dir.string());
  }
  for (const auto& entry : it) {
    if (entry.is_directory()) object_dirs_.push_back(entry.path());
  }
  std::sort(object_dirs_.begin(), object_dirs_.end());
}

std::optional<SubmissionObject> DirectoryBatchSource::Next() {
  if (next_ >= object_dirs_.size()) return std::nullopt;
  const std::filesystem::path dir = object_dirs_[next_++];

  SubmissionObject object;
  const std::filesystem::path id_file = dir / "content.id";
  const std::filesystem::path metadata_file = dir / "metadata.xml";
  if (!std::filesystem::exists(id_file) ||
      !std::filesystem::exists(metadata_file)) {
    throw Error(Errc::kInvalidArgument,
                dir.string() + " must contain content.id and metadata.xml");
  }
  object.content_id = FirstLineTrimmed(id_file);
  object.metadata_xml = StripToElement(ReadFileBytes(metadata_file));

  // Datastreams are numbered contiguously from 0.
  std::vector<std::uint64_t> numbers;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() <= 5 || name.compare(name.size() - 5, 5, ".data") != 0) {
      continue;
    }
    const std::string stem = name.substr(0, name.size() - 5);
    std::uint64_t n = 0;
    bool numeric = !stem.empty();
    for (const char c : stem) {
      if (c < '0' || c > '9') {
        numeric = false;
        break;
      }
      n = n * 10 + static_cast<std::uint64_t>(c - '0');
    }
    if (!numeric) {
      throw Error(Errc::kInvalidArgument,
                  "datastream file name is not numbered: " + name);
    }
    numbers.push_back(n);
  }
  std::sort(numbers.begin(), numbers.end());
  for (std::size_t i = 0; i < numbers.size(); ++i) {
    if (numbers[i] != i) {
      throw Error(Errc::kInvalidArgument,
                  "datastream numbering in " + dir.string() +
                      " is not contiguous from 0");
    }
  }
  for (std::size_t i = 0; i < numbers.size(); ++i) {
    const std::filesystem::path data_file =
        dir / (std::to_string(i) + ".data");
    const std::filesystem::path media_file =
        dir / (std::to_string(i) + ".mediatype");
    if (!std::filesystem::exists(media_file)) {
      throw Error(Errc::kInvalidArgument,
                  "missing sidecar " + media_file.string());
    }
    Datastream ds;
    ds.media_type = FirstLineTrimmed(media_file);
    const std::string bytes = ReadFileBytes(data_file);
    ds.data.assign(bytes.begin(), bytes.end());
    object.datastreams.push_back(std::move(ds));
  }
  return object;
}

std::string MakeWrapper(const SubmissionObject& object,
                        const std::vector<DatastreamRef>& refs,
                        const RepoUri& package_id, UtcSeconds created) {
  if (refs.size() != object.datastreams.size()) {
    throw Error(Errc::kInvalidArgument,
                "reference count " + std::to_string(refs.size()) +
                    " does not match datastream count " +
                    std::to_string(object.datastreams.size()));
  }
  WrapperDocument doc{package_id, object.content_id, created,
                      object.metadata_xml, refs};
  return WrapperToXml(doc);
}

IngestReport IngestBatch(ObjectSource& source, const StoreLayout& store,
                         const IngestConfig& config) {
  // Fail fast on bad templates before creating anything.
  const Uuid probe = Uuid::Random();
  ExpandUuidTemplate(config.openurl_base_template, probe);
  ExpandUuidTemplate(config.oai_base_template, probe);
  store.EnsureDirectories();

  const RepoUri tape_id = RepoUri::Mint(UriClass::kTape);
  std::vector<ArcInProgress> arcs;
  std::vector<PendingRecord> pending;
  std::vector<ObjectIngestResult> results;
  std::vector<std::filesystem::path> temporaries;

  auto cleanup = [&] {
    for (ArcInProgress& arc : arcs) arc.writer.reset();
    for (const std::filesystem::path& path : temporaries) RemoveQuietly(path);
  };

  try {
    UtcSeconds previous = std::numeric_limits<UtcSeconds>::min();
    std::size_t object_index = 0;
    while (auto object = source.Next()) {
      const std::string where = "object " + std::to_string(object_index);
      if (!IsValidContentId(object->content_id)) {
        throw Error(Errc::kInvalidArgument,
                    where + ": content identifier is not URI-shaped: '" +
                        object->content_id + "'");
      }
      try {
        xml::ParseStandaloneElement(object->metadata_xml);
      } catch (const Error& e) {
        throw Error(Errc::kPayloadError,
                    where + ": metadata is not a well-formed element: " +
                        e.what());
      }
      for (const Datastream& ds : object->datastreams) {
        if (!MediaTypeOk(ds.media_type)) {
          throw Error(Errc::kInvalidMediaType,
                      where + ": bad media type '" + ds.media_type + "'");
        }
      }

      // One clock sample per object, truncated to seconds, never going
      // backwards within the batch.
      UtcSeconds created = config.clock();
      if (created < previous) created = previous;
      previous = created;

      const RepoUri package_id = RepoUri::Mint(UriClass::kPackage);
      std::vector<DatastreamRef> refs;
      ObjectIngestResult result;
      result.content_id = object->content_id;
      result.package_id = package_id.ToString();

      for (const Datastream& ds : object->datastreams) {
        const RepoUri ds_id = RepoUri::Mint(UriClass::kDatastream);
        const std::uint64_t footprint =
            ArcRecordFootprint(ds_id, ds.media_type, ds.data.size());
        const bool need_new_arc =
            arcs.empty() || !arcs.back().writer ||
            (arcs.back().writer->record_count() > 0 &&
             arcs.back().writer->bytes_written() + footprint >
                 config.max_arc_bytes);
        if (need_new_arc) {
          if (!arcs.empty() && arcs.back().writer) {
            arcs.back().writer->Seal();
          }
          const RepoUri arc_id = RepoUri::Mint(UriClass::kArc);
          const std::filesystem::path final_path =
              store.ArcPath(arc_id.uuid());
          ArcInProgress arc{arc_id, StoreLayout::TemporaryName(final_path),
                            final_path, std::nullopt, {}};
          temporaries.push_back(arc.tmp_path);
          arc.writer = ArcWriter::Create(arc_id, arc.tmp_path, created);
          arcs.push_back(std::move(arc));
        }
        ArcInProgress& arc = arcs.back();
        const ByteExtent extent =
            arc.writer->Append(ds_id, ds.media_type, ds.data, created);
        arc.entries.push_back(
            IndexEntry{ds_id.ToString(), extent, created, 0});
        const std::string base =
            ExpandUuidTemplate(config.openurl_base_template, arc.id.uuid());
        refs.push_back(
            DatastreamRef{ds_id, ds.media_type, MakeOpenUrl(base, ds_id)});
        result.ds_ids.push_back(ds_id.ToString());
      }

      pending.push_back(PendingRecord{
          result.package_id, created,
          MakeWrapper(*object, refs, package_id, created)});
      results.push_back(std::move(result));
      ++object_index;
    }

    if (pending.empty()) {
      throw Error(Errc::kInvalidArgument, "batch contains no objects");
    }
    for (ArcInProgress& arc : arcs) {
      if (arc.writer && !arc.writer->sealed()) arc.writer->Seal();
      arc.writer.reset();
    }

    // All ARC bytes are on disk; now write the tape.
    TapeAdmin admin{tape_id, {}, {}};
    for (const ArcInProgress& arc : arcs) admin.arc_ids.push_back(arc.id);
    admin.provenance.emplace_back("software",
                                  "tapestore/" TAPESTORE_VERSION_STRING);
    admin.provenance.emplace_back("processingTime",
                                  FormatIso(config.clock()));
    for (const auto& prop : config.extra_provenance) {
      admin.provenance.push_back(prop);
    }

    const std::filesystem::path tape_final = store.TapePath(tape_id.uuid());
    const std::filesystem::path tape_tmp =
        StoreLayout::TemporaryName(tape_final);
    temporaries.push_back(tape_tmp);
    std::vector<IndexEntry> tape_entries;
    {
      TapeWriter writer = TapeWriter::Create(admin, tape_tmp);
      for (const PendingRecord& record : pending) {
        TapeRecord tape_record;
        tape_record.admin.record_id = record.record_id;
        tape_record.admin.created = record.created;
        tape_record.payload = record.wrapper_xml;
        const ByteExtent extent = writer.Append(tape_record);
        tape_entries.push_back(
            IndexEntry{record.record_id, extent, record.created, 0});
      }
      writer.Seal();
    }

    // Indexes, still under temporary names (the staleness header hashes
    // file contents, which renames do not change).
    std::vector<std::filesystem::path> index_paths;
    for (ArcInProgress& arc : arcs) {
      const std::filesystem::path tmp_index =
          WriteArcIndex(arc.tmp_path, std::move(arc.entries));
      temporaries.push_back(tmp_index);
      index_paths.push_back(IdIndexPathFor(arc.final_path));
    }
    const TapeIndexPaths tape_tmp_indexes =
        WriteTapeIndexes(tape_tmp, std::move(tape_entries));
    temporaries.push_back(tape_tmp_indexes.id);
    temporaries.push_back(tape_tmp_indexes.dt);
    index_paths.push_back(IdIndexPathFor(tape_final));
    index_paths.push_back(DtIndexPathFor(tape_final));

    // Publication order: ARC files, their indexes, the tape, its indexes,
    // then locator registrations. A crash in between never leaves a
    // visible tape whose ARC references dangle.
    for (const ArcInProgress& arc : arcs) {
      std::filesystem::rename(arc.tmp_path, arc.final_path);
    }
    for (const ArcInProgress& arc : arcs) {
      std::filesystem::rename(IdIndexPathFor(arc.tmp_path),
                              IdIndexPathFor(arc.final_path));
    }
    std::filesystem::rename(tape_tmp, tape_final);
    std::filesystem::rename(tape_tmp_indexes.id, IdIndexPathFor(tape_final));
    std::filesystem::rename(tape_tmp_indexes.dt, DtIndexPathFor(tape_final));

    Locator locator = Locator::Open(store.locator_log());
    std::vector<VersionEntry> versions;
    versions.reserve(results.size());
    for (std::size_t i = 0; i < results.size(); ++i) {
      versions.push_back(VersionEntry{results[i].content_id,
                                      results[i].package_id, tape_id,
                                      pending[i].created});
    }
    locator.RegisterAll(versions);

    IngestReport report{tape_id, {}, tape_final, {}, std::move(index_paths),
                        std::move(results)};
    for (const ArcInProgress& arc : arcs) {
      report.arc_ids.push_back(arc.id);
      report.arc_paths.push_back(arc.final_path);
    }
    return report;
  } catch (...) {
    cleanup();
    throw;
  }
}

std::string SerializeManifest(const IngestReport& report) {
  std::string out = "tape\t" + report.tape_id.ToString() + "\n";
  for (const RepoUri& arc_id : report.arc_ids) {
    out += "arc\t" + arc_id.ToString() + "\n";
  }
  for (const ObjectIngestResult& object : report.objects) {
    out += "object\t" + object.content_id + "\t" + object.package_id + "\t";
    for (std::size_t i = 0; i < object.ds_ids.size(); ++i) {
      if (i > 0) out += ",";
      out += object.ds_ids[i];
    }
    out += "\n";
  }
  return out;
}

}  // namespace tapestore
