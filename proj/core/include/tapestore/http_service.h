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

#ifndef TAPESTORE_HTTP_SERVICE_H_
#define TAPESTORE_HTTP_SERVICE_H_

#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>

#include "tapestore/oai.h"
#include "tapestore/store.h"

namespace httplib {
class Server;
}

namespace tapestore {

// The machine-facing access layer. One process mounts every sealed tape and
// ARC file under the store root and serves:
//
//   GET /oai/<tape-uuid>      OAI-PMH 2.0, one autonomous repository per tape
//   GET /openurl/<arc-uuid>   KEV OpenURL resolver, one per ARC file
//   GET /locate?id=<content>  all versions of a Digital Object (JSON)
//
// Stores are immutable once mounted, so request handling is fully
// concurrent over a read-only snapshot; Mount() swaps snapshots atomically.
struct ServiceConfig {
  std::filesystem::path store_root;
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 binds an ephemeral port
  OaiConfig oai;
  // Default: http://<host>:<port>/oai/{uuid}
  std::string oai_base_template;
  // Reject OpenURLs without url_ver instead of warning.
  bool strict_openurl = false;
};

class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds the listening socket; with port 0 an ephemeral port is chosen and
  // available via bound_port() afterwards.
  bool Bind();
  int bound_port() const { return bound_port_; }

  struct MountStats {
    std::size_t tapes = 0;
    std::size_t arcs = 0;
    std::size_t skipped = 0;  // files whose indexes failed verification
  };

  // Discovers sealed files with verified indexes and swaps the snapshot.
  MountStats Mount();

  // Serves until Stop(); requires Bind() first.
  bool ListenAfterBind();
  void Stop();

 private:
  struct Mounted;

  std::shared_ptr<const Mounted> snapshot() const;
  void InstallRoutes();
  std::string EffectiveOaiTemplate() const;

  ServiceConfig config_;
  std::unique_ptr<httplib::Server> server_;
  mutable std::mutex mu_;
  std::shared_ptr<const Mounted> mounted_;
  int bound_port_ = -1;
};

}  // namespace tapestore

#endif  // TAPESTORE_HTTP_SERVICE_H_
