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

#ifndef TAPESTORE_INGEST_H_
#define TAPESTORE_INGEST_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tapestore/identifier.h"
#include "tapestore/store.h"
#include "tapestore/timeutil.h"
#include "tapestore/wrapper.h"

namespace tapestore {

// One submitted Digital Object: externally assigned content identifier,
// descriptive metadata stored by-value, constituent datastreams stored
// by-reference in ARC files.
struct Datastream {
  std::string media_type;
  std::vector<std::uint8_t> data;
};

struct SubmissionObject {
  std::string content_id;
  std::string metadata_xml;  // one well-formed element
  std::vector<Datastream> datastreams;
};

// Streaming provider so that a batch never has to fit in memory at once.
class ObjectSource {
 public:
  virtual ~ObjectSource() = default;
  virtual std::optional<SubmissionObject> Next() = 0;
};

class VectorObjectSource : public ObjectSource {
 public:
  explicit VectorObjectSource(std::vector<SubmissionObject> objects)
      : objects_(std::move(objects)) {}
  std::optional<SubmissionObject> Next() override {
    if (next_ >= objects_.size()) return std::nullopt;
    return std::move(objects_[next_++]);
  }

 private:
  std::vector<SubmissionObject> objects_;
  std::size_t next_ = 0;
};

// Reads a batch directory: one subdirectory per object (processed in byte
// order of their names), each containing
//   content.id      first line: the content identifier
//   metadata.xml    the metadata element (a leading XML declaration and
//                   surrounding whitespace are tolerated and stripped)
//   0.data, 0.mediatype, 1.data, 1.mediatype, ...
//                   datastreams in order; numbering is contiguous from 0;
//                   each .mediatype sidecar holds the media type on line 1
class DirectoryBatchSource : public ObjectSource {
 public:
  explicit DirectoryBatchSource(const std::filesystem::path& batch_dir);
  std::optional<SubmissionObject> Next() override;

 private:
  std::vector<std::filesystem::path> object_dirs_;
  std::size_t next_ = 0;
};

struct IngestConfig {
  // Current ARC file rolls over once it would exceed this; a single
  // oversized datastream still gets written (into its own file).
  std::uint64_t max_arc_bytes = 500ull << 20;

  // Where access will be served from; {uuid} is replaced with the ARC /
  // tape UUID respectively.
  std::string openurl_base_template;  // e.g. http://host:port/openurl/{uuid}
  std::string oai_base_template;      // e.g. http://host:port/oai/{uuid}

  // Sampled once per object at wrapper creation, truncated to seconds.
  std::function<UtcSeconds()> clock = NowUtcSeconds;

  std::vector<std::pair<std::string, std::string>> extra_provenance;
};

struct ObjectIngestResult {
  std::string content_id;
  std::string package_id;
  std::vector<std::string> ds_ids;
};

struct IngestReport {
  RepoUri tape_id;
  std::vector<RepoUri> arc_ids;  // creation order
  std::filesystem::path tape_path;
  std::vector<std::filesystem::path> arc_paths;
  std::vector<std::filesystem::path> index_paths;
  std::vector<ObjectIngestResult> objects;
};

// Builds the wrapper document for one object. The reference list must match
// the object's datastreams one-to-one, in submission order.
std::string MakeWrapper(const SubmissionObject& object,
                        const std::vector<DatastreamRef>& refs,
                        const RepoUri& package_id, UtcSeconds created);

// Transforms one batch into exactly one sealed tape, zero or more sealed
// ARC files (rolled over at max_arc_bytes), their indexes, and locator
// registrations. All writes land under temporary names and are renamed only
// once the whole batch has been validated and sealed; on failure no visible
// file appears and temporaries are removed. Record datestamps are
// non-decreasing across the batch.
IngestReport IngestBatch(ObjectSource& source, const StoreLayout& store,
                         const IngestConfig& config);

// Line-oriented manifest:
//   tape \t <tape id>
//   arc \t <arc id>                          (per ARC, creation order)
//   object \t <content id> \t <package id> \t <ds id>,<ds id>,...
std::string SerializeManifest(const IngestReport& report);

}  // namespace tapestore

#endif  // TAPESTORE_INGEST_H_
