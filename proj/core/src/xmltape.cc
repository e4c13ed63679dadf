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

#include "tapestore/xmltape.h"

#include <boost/property_tree/detail/rapidxml.hpp>

#include <fstream>
#include <sstream>

#include "tapestore/error.h"
#include "tapestore/xml.h"

namespace tapestore {

namespace {

constexpr std::string_view kProlog =
    "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
constexpr std::string_view kRootOpen =
    "<t:tape xmlns:t=\"urn:xmltape:1.0\">\n";
constexpr std::string_view kRootClose = "</t:tape>\n";
constexpr std::string_view kRecordOpen =
    "<t:tapeRecord xmlns:t=\"urn:xmltape:1.0\">\n";

void RequireXmlSafe(std::string_view value, std::string_view what) {
  if (!xml::IsXmlSafe(value)) {
    throw Error(Errc::kInvalidArgument,
                std::string(what) + " contains bytes not allowed in XML");
  }
}

void RequireIdentifierString(std::string_view id, std::string_view what) {
  if (id.empty()) {
    throw Error(Errc::kInvalidArgument, std::string(what) + " is empty");
  }
  for (const char c : id) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (u <= 0x20 || u == 0x7f) {
      throw Error(Errc::kInvalidArgument,
                  std::string(what) + " contains whitespace or control bytes");
    }
  }
}

std::string PropLine(const std::pair<std::string, std::string>& prop) {
  return "<t:prop name=\"" + xml::EscapeAttr(prop.first) + "\" value=\"" +
         xml::EscapeAttr(prop.second) + "\"/>\n";
}

std::string SerializeTapeAdmin(const TapeAdmin& admin) {
  std::string out = "<t:tapeAdmin>\n";
  out += "<t:tapeId>" + xml::EscapeText(admin.tape_id.ToString()) +
         "</t:tapeId>\n";
  for (const RepoUri& arc_id : admin.arc_ids) {
    out += "<t:arcId>" + xml::EscapeText(arc_id.ToString()) + "</t:arcId>\n";
  }
  for (const auto& prop : admin.provenance) {
    out += PropLine(prop);
  }
  out += "</t:tapeAdmin>\n";
  return out;
}

std::string SerializeRecord(const TapeRecord& record) {
  std::string out(kRecordOpen);
  out += "<t:recordAdmin>\n";
  out += "<t:identifier>" + xml::EscapeText(record.admin.record_id) +
         "</t:identifier>\n";
  out += "<t:date>" + FormatIso(record.admin.created) + "</t:date>\n";
  for (const auto& prop : record.admin.props) {
    out += PropLine(prop);
  }
  out += "</t:recordAdmin>\n";
  out += "<t:record>";
  out += record.payload;
  out += "</t:record>\n";
  out += "</t:tapeRecord>";
  return out;
}

bool IsTapeElement(const xml::Element& elem, std::string_view local) {
  return elem.Is(kTapeNsUri, local);
}

bool IsWhitespaceOnly(std::string_view s) {
  for (const char c : s) {
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') return false;
  }
  return true;
}

std::pair<std::string, std::string> ExtractProp(const xml::Element& elem) {
  const std::string* name = elem.FindAttr("name");
  const std::string* value = elem.FindAttr("value");
  if (name == nullptr || value == nullptr) {
    throw Error(Errc::kScanError, "prop element needs name and value",
                elem.begin);
  }
  return {*name, *value};
}

TapeAdmin ExtractTapeAdmin(const xml::Element& elem) {
  if (elem.children.empty() || !IsTapeElement(elem.children[0], "tapeId")) {
    throw Error(Errc::kScanError, "tape admin must start with tapeId",
                elem.begin);
  }
  const RepoUri tape_id = [&] {
    try {
      return RepoUri::Parse(elem.children[0].text);
    } catch (const Error& e) {
      throw Error(Errc::kScanError,
                  std::string("bad tapeId: ") + e.what(), elem.begin);
    }
  }();
  if (tape_id.cls() != UriClass::kTape) {
    throw Error(Errc::kScanError, "tapeId is not a tape identifier",
                elem.begin);
  }
  TapeAdmin admin{tape_id, {}, {}};
  bool saw_prop = false;
  for (std::size_t i = 1; i < elem.children.size(); ++i) {
    const xml::Element& child = elem.children[i];
    if (IsTapeElement(child, "arcId")) {
      if (saw_prop) {
        throw Error(Errc::kScanError, "arcId after prop in tape admin",
                    child.begin);
      }
      const auto arc = RepoUri::TryParse(child.text);
      if (!arc || arc->cls() != UriClass::kArc) {
        throw Error(Errc::kScanError, "bad arcId '" + child.text + "'",
                    child.begin);
      }
      admin.arc_ids.push_back(*arc);
    } else if (IsTapeElement(child, "prop")) {
      saw_prop = true;
      admin.provenance.push_back(ExtractProp(child));
    } else {
      throw Error(Errc::kScanError,
                  "unexpected element '" + child.qname + "' in tape admin",
                  child.begin);
    }
  }
  return admin;
}

// Pulls the two strictly defined admin elements (identifier, creation
// datetime) plus optional props out of a record container, and locates the
// payload element.
void ExtractRecord(const xml::Element& container, TapeRecordAdmin* admin,
                   const xml::Element** payload) {
  if (!IsTapeElement(container, "tapeRecord")) {
    throw Error(Errc::kScanError,
                "expected tapeRecord element, found '" + container.qname + "'",
                container.begin);
  }
  if (!IsWhitespaceOnly(container.text)) {
    throw Error(Errc::kScanError, "stray text inside tapeRecord",
                container.begin);
  }
  if (container.children.size() != 2 ||
      !IsTapeElement(container.children[0], "recordAdmin") ||
      !IsTapeElement(container.children[1], "record")) {
    throw Error(Errc::kScanError,
                "tapeRecord must contain recordAdmin followed by record",
                container.begin);
  }
  const xml::Element& record_admin = container.children[0];
  if (record_admin.children.size() < 2 ||
      !IsTapeElement(record_admin.children[0], "identifier")) {
    throw Error(Errc::kScanError,
                "missing mandatory admin element 'identifier'",
                record_admin.begin);
  }
  if (!IsTapeElement(record_admin.children[1], "date")) {
    throw Error(Errc::kScanError, "missing mandatory admin element 'date'",
                record_admin.begin);
  }
  admin->record_id = record_admin.children[0].text;
  if (admin->record_id.empty()) {
    throw Error(Errc::kScanError, "empty record identifier",
                record_admin.begin);
  }
  const auto created = ParseIso(record_admin.children[1].text);
  if (!created) {
    throw Error(Errc::kScanError,
                "record datetime must be YYYY-MM-DDThh:mm:ssZ, got '" +
                    record_admin.children[1].text + "'",
                record_admin.children[1].begin);
  }
  admin->created = *created;
  admin->props.clear();
  for (std::size_t i = 2; i < record_admin.children.size(); ++i) {
    const xml::Element& child = record_admin.children[i];
    if (!IsTapeElement(child, "prop")) {
      throw Error(Errc::kScanError,
                  "unexpected element '" + child.qname + "' in record admin",
                  child.begin);
    }
    admin->props.push_back(ExtractProp(child));
  }
  const xml::Element& record_wrap = container.children[1];
  if (record_wrap.children.size() != 1 ||
      !IsWhitespaceOnly(record_wrap.text)) {
    throw Error(Errc::kScanError,
                "record must wrap exactly one payload element",
                record_wrap.begin);
  }
  *payload = &record_wrap.children[0];
}

void ScanTapeInto(std::istream& in, std::optional<TapeAdmin>* admin,
                  std::vector<std::pair<TapeRecordAdmin, ByteExtent>>* records) {
  xml::Tokenizer tok(in);
  xml::NsContext ns;

  // Prolog: an optional XML declaration, then whitespace, comments or PIs
  // until the root element.
  xml::Event ev = tok.Next();
  while (true) {
    if (ev.type == xml::EventType::kStartElement) break;
    if (ev.type == xml::EventType::kXmlDecl ||
        ev.type == xml::EventType::kComment ||
        ev.type == xml::EventType::kProcessingInstruction) {
      ev = tok.Next();
      continue;
    }
    if (ev.type == xml::EventType::kText && IsWhitespaceOnly(ev.text)) {
      ev = tok.Next();
      continue;
    }
    throw Error(Errc::kScanError, "expected tape root element", ev.begin);
  }

  const xml::Event root = ev;
  ns.Push(root.attributes, root.begin);
  std::string root_prefix, root_local;
  {
    const std::size_t colon = root.qname.find(':');
    root_prefix = colon == std::string::npos ? "" : root.qname.substr(0, colon);
    root_local =
        colon == std::string::npos ? root.qname : root.qname.substr(colon + 1);
  }
  const auto root_ns = ns.Resolve(root_prefix);
  if (!root_ns || *root_ns != kTapeNsUri || root_local != "tape") {
    throw Error(Errc::kScanError, "root element is not an XMLtape",
                root.begin);
  }

  bool seen_admin = false;
  while (true) {
    ev = tok.Next();
    if (ev.type == xml::EventType::kEndElement) {
      if (ev.qname != root.qname) {
        throw Error(Errc::kScanError, "mismatched root end tag", ev.begin);
      }
      break;
    }
    if (ev.type == xml::EventType::kText) {
      if (!IsWhitespaceOnly(ev.text)) {
        throw Error(Errc::kScanError, "stray text at tape level", ev.begin);
      }
      continue;
    }
    if (ev.type == xml::EventType::kComment ||
        ev.type == xml::EventType::kProcessingInstruction) {
      continue;
    }
    if (ev.type == xml::EventType::kStartElement ||
        ev.type == xml::EventType::kEmptyElement) {
      if (!seen_admin) {
        xml::Element elem = xml::BuildSubtree(tok, ev, ns);
        if (!IsTapeElement(elem, "tapeAdmin")) {
          throw Error(Errc::kScanError,
                      "tape must start with a tapeAdmin section", elem.begin);
        }
        seen_admin = true;
        *admin = ExtractTapeAdmin(elem);
        continue;
      }
      TapeRecordAdmin record_admin;
      ByteExtent extent{};
      try {
        xml::Element elem = xml::BuildSubtree(tok, ev, ns);
        if (IsTapeElement(elem, "tapeAdmin")) {
          throw Error(Errc::kScanError,
                      "only one tapeAdmin section is allowed", elem.begin);
        }
        const xml::Element* payload = nullptr;
        ExtractRecord(elem, &record_admin, &payload);
        extent = ByteExtent{elem.begin, elem.end - elem.begin};
      } catch (const Error& e) {
        if (e.code() != Errc::kScanError) throw;
        std::string message = e.what();
        const std::string prefix = std::string(ErrcName(Errc::kScanError)) +
                                   ": ";
        if (message.rfind(prefix, 0) == 0) message = message.substr(prefix.size());
        throw Error(Errc::kScanError,
                    message + " (record ordinal " +
                        std::to_string(records->size()) + ")",
                    e.byte_offset().value_or(ev.begin));
      }
      records->emplace_back(std::move(record_admin), extent);
      continue;
    }
    throw Error(Errc::kScanError, "unexpected content at tape level",
                ev.begin);
  }
  if (!seen_admin) {
    throw Error(Errc::kScanError, "tape has no tapeAdmin section", root.begin);
  }

  // Trailing content after the root element.
  while (true) {
    ev = tok.Next();
    if (ev.type == xml::EventType::kEof) break;
    if (ev.type == xml::EventType::kComment ||
        ev.type == xml::EventType::kProcessingInstruction) {
      continue;
    }
    if (ev.type == xml::EventType::kText && IsWhitespaceOnly(ev.text)) {
      continue;
    }
    throw Error(Errc::kScanError, "content after tape root element", ev.begin);
  }
}

}  // namespace

TapeWriter TapeWriter::Create(const TapeAdmin& admin,
                              const std::filesystem::path& path) {
  std::error_code ec;
  if (std::filesystem::exists(path, ec) &&
      std::filesystem::file_size(path, ec) > 0) {
    throw Error(Errc::kWriteOnceViolation,
                "destination not empty: " + path.string());
  }
  auto out = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*out) {
    throw Error(Errc::kIoError, "cannot open " + path.string());
  }
  return TapeWriter(admin, std::move(out));
}

TapeWriter::TapeWriter(const TapeAdmin& admin,
                       std::unique_ptr<std::ostream> sink)
    : admin_(admin), sink_(std::move(sink)) {
  if (admin_.tape_id.cls() != UriClass::kTape) {
    throw Error(Errc::kInvalidClass, "tape writer requires a tape identifier");
  }
  for (const RepoUri& arc_id : admin_.arc_ids) {
    if (arc_id.cls() != UriClass::kArc) {
      throw Error(Errc::kInvalidClass, "tape admin arcId of wrong class");
    }
  }
  for (const auto& prop : admin_.provenance) {
    RequireXmlSafe(prop.first, "provenance name");
    RequireXmlSafe(prop.second, "provenance value");
  }
  std::string head(kProlog);
  head += kRootOpen;
  head += SerializeTapeAdmin(admin_);
  WriteRaw(head);
}

void TapeWriter::WriteRaw(std::string_view bytes) {
  sink_->write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!*sink_) {
    throw Error(Errc::kIoError, "write failed on tape sink");
  }
  position_ += bytes.size();
}

ByteExtent TapeWriter::Append(const TapeRecord& record) {
  if (sealed_) {
    throw Error(Errc::kSealed, "tape already sealed");
  }
  RequireIdentifierString(record.admin.record_id, "record identifier");
  for (const auto& prop : record.admin.props) {
    RequireXmlSafe(prop.first, "record prop name");
    RequireXmlSafe(prop.second, "record prop value");
  }
  if (seen_ids_.contains(record.admin.record_id)) {
    throw Error(Errc::kDuplicateKey,
                "record identifier already in tape: " + record.admin.record_id);
  }
  // The payload must stand alone: well-formed as sliced, with every
  // namespace declaration it needs inside itself.
  try {
    const xml::Element payload_root =
        xml::ParseStandaloneElement(record.payload);
    if (payload_root.ns_uri.empty()) {
      throw Error(Errc::kPayloadError,
                  "payload root element is not namespace-qualified");
    }
  } catch (const Error& e) {
    if (e.code() == Errc::kPayloadError) throw;
    throw Error(Errc::kPayloadError,
                std::string("payload is not a well-formed standalone "
                            "element: ") +
                    e.what());
  }
  const std::string serialized = SerializeRecord(record);
  const ByteExtent extent{position_, serialized.size()};
  WriteRaw(serialized);
  WriteRaw("\n");
  seen_ids_.insert(record.admin.record_id);
  ++record_count_;
  return extent;
}

TapeSummary TapeWriter::Seal() {
  if (sealed_) {
    throw Error(Errc::kSealed, "tape already sealed");
  }
  WriteRaw(kRootClose);
  sink_->flush();
  if (!*sink_) {
    throw Error(Errc::kIoError, "flush failed on tape sink");
  }
  sealed_ = true;
  return TapeSummary{admin_.tape_id, record_count_, position_};
}

TapeScan ScanTape(std::istream& in) {
  std::optional<TapeAdmin> admin;
  std::vector<std::pair<TapeRecordAdmin, ByteExtent>> records;
  ScanTapeInto(in, &admin, &records);
  return TapeScan{std::move(*admin), std::move(records)};
}

TapeScan ScanTape(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::kIoError, "cannot open " + path.string());
  }
  return ScanTape(in);
}

TapeRecord ParseRecordSlice(std::string_view bytes) {
  try {
    const xml::Element container = xml::ParseStandaloneElement(bytes);
    TapeRecordAdmin admin;
    const xml::Element* payload = nullptr;
    ExtractRecord(container, &admin, &payload);
    TapeRecord record;
    record.admin = std::move(admin);
    record.payload = std::string(
        bytes.substr(payload->begin, payload->end - payload->begin));
    return record;
  } catch (const Error& e) {
    if (e.code() != Errc::kScanError) throw;
    const auto offset = e.byte_offset();
    if (offset) {
      throw Error(Errc::kCorruptExtent, e.what(), *offset);
    }
    throw Error(Errc::kCorruptExtent, e.what());
  }
}

TapeRecord ReadRecordAt(std::istream& in, const ByteExtent& extent) {
  in.clear();
  in.seekg(0, std::ios::end);
  const std::uint64_t size = static_cast<std::uint64_t>(in.tellg());
  if (extent.offset > size || extent.length > size - extent.offset) {
    throw Error(Errc::kOutOfBounds,
                "extent " + std::to_string(extent.offset) + "+" +
                    std::to_string(extent.length) + " exceeds file size " +
                    std::to_string(size));
  }
  in.seekg(static_cast<std::streamoff>(extent.offset));
  std::string bytes(extent.length, '\0');
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::uint64_t>(in.gcount()) != extent.length) {
    throw Error(Errc::kIoError, "short read", extent.offset);
  }
  return ParseRecordSlice(bytes);
}

TapeRecord ReadRecordAt(const std::filesystem::path& path,
                        const ByteExtent& extent) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::kIoError, "cannot open " + path.string());
  }
  return ReadRecordAt(in, extent);
}

// ---------------------------------------------------------------------------
// Validation

namespace {

namespace rx = boost::property_tree::detail::rapidxml;

std::string_view NodePrefix(std::string_view qname) {
  const std::size_t colon = qname.find(':');
  return colon == std::string_view::npos ? std::string_view()
                                         : qname.substr(0, colon);
}

std::string_view NodeLocal(std::string_view qname) {
  const std::size_t colon = qname.find(':');
  return colon == std::string_view::npos ? qname : qname.substr(colon + 1);
}

// Resolves `prefix` against xmlns declarations on `node` and its ancestors.
std::optional<std::string_view> ResolvePrefix(rx::xml_node<>* node,
                                              std::string_view prefix) {
  for (rx::xml_node<>* cur = node; cur != nullptr; cur = cur->parent()) {
    if (cur->type() != rx::node_element) continue;
    for (rx::xml_attribute<>* attr = cur->first_attribute(); attr != nullptr;
         attr = attr->next_attribute()) {
      const std::string_view name(attr->name(), attr->name_size());
      if (prefix.empty() && name == "xmlns") {
        return std::string_view(attr->value(), attr->value_size());
      }
      if (!prefix.empty() && name.size() == prefix.size() + 6 &&
          name.rfind("xmlns:", 0) == 0 && name.substr(6) == prefix) {
        return std::string_view(attr->value(), attr->value_size());
      }
    }
  }
  if (prefix.empty()) return std::string_view();
  return std::nullopt;
}

bool NodeIsTapeRecord(rx::xml_node<>* node) {
  const std::string_view qname(node->name(), node->name_size());
  const auto ns = ResolvePrefix(node, NodePrefix(qname));
  return ns && *ns == kTapeNsUri && NodeLocal(qname) == "tapeRecord";
}

}  // namespace

ValidationReport ValidateTape(const std::filesystem::path& path) {
  ValidationReport report;

  // Independent full parse. rapidxml shares no code with the scanner or the
  // write path, so it gives an off-the-shelf second opinion on
  // well-formedness and an independent record census.
  std::string content;
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw Error(Errc::kIoError, "cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    content = std::move(buf).str();
  }
  std::vector<char> mutable_copy(content.begin(), content.end());
  mutable_copy.push_back('\0');
  bool parse_ok = false;
  rx::xml_document<> doc;
  try {
    doc.parse<rx::parse_validate_closing_tags | rx::parse_no_data_nodes>(
        mutable_copy.data());
    parse_ok = true;
  } catch (const rx::parse_error& e) {
    report.findings.push_back(ValidationFinding{
        "not-well-formed", e.what(), std::nullopt,
        static_cast<std::uint64_t>(e.where<char>() - mutable_copy.data())});
  }
  if (parse_ok) {
    rx::xml_node<>* root = doc.first_node();
    for (rx::xml_node<>* child = root ? root->first_node() : nullptr;
         child != nullptr; child = child->next_sibling()) {
      if (child->type() == rx::node_element && NodeIsTapeRecord(child)) {
        ++report.full_parse_record_count;
      }
    }
  }

  // Streaming scan with byte extents.
  std::optional<TapeAdmin> admin;
  std::vector<std::pair<TapeRecordAdmin, ByteExtent>> records;
  bool scan_ok = false;
  try {
    std::istringstream in(content);
    ScanTapeInto(in, &admin, &records);
    scan_ok = true;
  } catch (const Error& e) {
    report.findings.push_back(ValidationFinding{
        "structure", e.what(), records.size(), e.byte_offset()});
  }
  report.scan_record_count = records.size();

  if (scan_ok) {
    std::unordered_set<std::string> ids;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (!ids.insert(records[i].first.record_id).second) {
        report.findings.push_back(ValidationFinding{
            "duplicate-identifier",
            "record identifier '" + records[i].first.record_id +
                "' appears more than once",
            i, records[i].second.offset});
      }
    }
  }

  if (parse_ok && scan_ok &&
      report.full_parse_record_count != report.scan_record_count) {
    report.findings.push_back(ValidationFinding{
        "census-mismatch",
        "full parse found " + std::to_string(report.full_parse_record_count) +
            " records, scan found " +
            std::to_string(report.scan_record_count),
        std::nullopt, std::nullopt});
  }
  return report;
}

}  // namespace tapestore
