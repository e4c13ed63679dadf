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

#include "tapestore/http_service.h"

#include <httplib.h>

#include <iostream>
#include <map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tapestore/arc_file.h"
#include "tapestore/error.h"
#include "tapestore/index.h"
#include "tapestore/locator.h"

namespace tapestore {

namespace {

using nlohmann::json;

OaiParams ParamsFrom(const httplib::Params& params) {
  OaiParams out;
  out.reserve(params.size());
  for (const auto& [key, value] : params) {
    out.emplace_back(key, value);
  }
  return out;
}

}  // namespace

struct Service::Mounted {
  struct MountedArc {
    RepoUri id;
    std::filesystem::path path;
    std::shared_ptr<const Index> index;
  };

  std::map<std::string, std::shared_ptr<const TapeRepository>> tapes;
  std::map<std::string, MountedArc> arcs;
  std::shared_ptr<const Locator> locator;
  std::string oai_base_template;
};

Service::Service(ServiceConfig config)
    : config_(std::move(config)),
      server_(std::make_unique<httplib::Server>()),
      mounted_(std::make_shared<Mounted>()) {
  InstallRoutes();
}

Service::~Service() {
  Stop();
}

std::shared_ptr<const Service::Mounted> Service::snapshot() const {
  std::lock_guard lock(mu_);
  return mounted_;
}

bool Service::Bind() {
  if (config_.port == 0) {
    bound_port_ = server_->bind_to_any_port(config_.host);
    return bound_port_ > 0;
  }
  if (!server_->bind_to_port(config_.host, config_.port)) return false;
  bound_port_ = config_.port;
  return true;
}

std::string Service::EffectiveOaiTemplate() const {
  if (!config_.oai_base_template.empty()) return config_.oai_base_template;
  const int port = bound_port_ > 0 ? bound_port_ : config_.port;
  return "http://" + config_.host + ":" + std::to_string(port) +
         "/oai/{uuid}";
}

Service::MountStats Service::Mount() {
  const StoreLayout store(config_.store_root);
  auto mounted = std::make_shared<Mounted>();
  mounted->oai_base_template = EffectiveOaiTemplate();
  MountStats stats;

  for (const std::filesystem::path& path : store.ListTapes()) {
    const auto uuid = Uuid::Parse(path.stem().string());
    if (!uuid) {
      ++stats.skipped;
      continue;
    }
    try {
      Index id_index =
          Index::Load(IdIndexPathFor(path), path, IndexOrder::kById);
      Index dt_index =
          Index::Load(DtIndexPathFor(path), path, IndexOrder::kByDatetime);
      const RepoUri tape_id(UriClass::kTape, *uuid);
      const std::string base_url =
          ExpandUuidTemplate(mounted->oai_base_template, *uuid);
      mounted->tapes.emplace(
          uuid->ToString(),
          std::make_shared<TapeRepository>(tape_id, path, std::move(id_index),
                                           std::move(dt_index), base_url,
                                           config_.oai));
      ++stats.tapes;
    } catch (const Error& e) {
      std::cerr << "tapestore: skipping tape " << path << ": " << e.what()
                << "\n";
      ++stats.skipped;
    }
  }

  for (const std::filesystem::path& path : store.ListArcs()) {
    const auto uuid = Uuid::Parse(path.stem().string());
    if (!uuid) {
      ++stats.skipped;
      continue;
    }
    try {
      auto index = std::make_shared<const Index>(
          Index::Load(IdIndexPathFor(path), path, IndexOrder::kById));
      mounted->arcs.emplace(
          uuid->ToString(),
          Mounted::MountedArc{RepoUri(UriClass::kArc, *uuid), path,
                              std::move(index)});
      ++stats.arcs;
    } catch (const Error& e) {
      std::cerr << "tapestore: skipping ARC " << path << ": " << e.what()
                << "\n";
      ++stats.skipped;
    }
  }

  if (std::filesystem::exists(store.locator_log())) {
    mounted->locator =
        std::make_shared<const Locator>(Locator::Open(store.locator_log()));
  }

  std::lock_guard lock(mu_);
  mounted_ = std::move(mounted);
  return stats;
}

void Service::InstallRoutes() {
  server_->Get("/", [this](const httplib::Request&, httplib::Response& res) {
    const auto mounted = snapshot();
    json info;
    info["tapes"] = mounted->tapes.size();
    info["arcs"] = mounted->arcs.size();
    res.set_content(info.dump(2) + "\n", "application/json");
  });

  const auto oai_handler = [this](const httplib::Request& req,
                                  httplib::Response& res) {
    const auto mounted = snapshot();
    const auto it = mounted->tapes.find(req.matches[1].str());
    if (it == mounted->tapes.end()) {
      res.status = 404;
      res.set_content("no such tape\n", "text/plain");
      return;
    }
    res.set_content(it->second->Handle(ParamsFrom(req.params)),
                    "text/xml; charset=utf-8");
  };
  server_->Get(R"(/oai/([0-9a-f\-]{36}))", oai_handler);
  server_->Post(R"(/oai/([0-9a-f\-]{36}))", oai_handler);

  server_->Get(R"(/openurl/([0-9a-f\-]{36}))", [this](
                                                   const httplib::Request& req,
                                                   httplib::Response& res) {
    const auto mounted = snapshot();
    const auto it = mounted->arcs.find(req.matches[1].str());
    if (it == mounted->arcs.end()) {
      res.status = 404;
      res.set_content("no such ARC file\n", "text/plain");
      return;
    }
    if (!req.has_param("rft_id")) {
      res.status = 400;
      res.set_content("missing rft_id\n", "text/plain");
      return;
    }
    const std::string rft_id = req.get_param_value("rft_id");
    if (!req.has_param("url_ver")) {
      if (config_.strict_openurl) {
        res.status = 400;
        res.set_content("missing url_ver\n", "text/plain");
        return;
      }
      res.set_header("Warning", "199 - \"url_ver missing\"");
    }
    // The sole service is delivery of the referenced datastream; any other
    // KEV keys are ignored.
    const IndexEntry* entry = it->second.index->LookupId(rft_id);
    if (entry == nullptr) {
      res.status = 404;
      res.set_content("no such datastream\n", "text/plain");
      return;
    }
    auto [header, data] = ReadArcRecord(it->second.path, entry->extent);
    res.set_content(std::string(data.begin(), data.end()),
                    header.content_type);
  });

  server_->Get("/locate", [this](const httplib::Request& req,
                                 httplib::Response& res) {
    if (!req.has_param("id")) {
      res.status = 400;
      res.set_content("missing id parameter\n", "text/plain");
      return;
    }
    const auto mounted = snapshot();
    const std::string content_id = req.get_param_value("id");
    json out;
    out["contentId"] = content_id;
    out["versions"] = json::array();
    if (mounted->locator) {
      for (const ResolvedVersion& version : mounted->locator->Resolve(
               content_id, mounted->oai_base_template)) {
        json entry;
        entry["packageId"] = version.package_id;
        entry["oaiBaseUrl"] = version.oai_base_url;
        entry["created"] = FormatIso(version.created);
        out["versions"].push_back(std::move(entry));
      }
    }
    res.set_content(out.dump(2) + "\n", "application/json");
  });
}

bool Service::ListenAfterBind() {
  return server_->listen_after_bind();
}

void Service::Stop() {
  if (server_) server_->stop();
}

}  // namespace tapestore
