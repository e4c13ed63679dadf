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

#ifndef TAPESTORE_XML_H_
#define TAPESTORE_XML_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tapestore::xml {

// Streaming XML tokenizer that reports the byte extent of every token on the
// raw encoded input. Most XML parsers cannot report byte positions, which is
// exactly what offset/length indexes need; this one exists for that purpose.
//
// It is a well-formedness-oriented subset of XML 1.0 + Namespaces:
// elements, attributes, character data, entity and character references,
// CDATA sections, comments, and processing instructions. DOCTYPE is
// rejected. Input must be UTF-8 without byte-order mark.

enum class EventType {
  kXmlDecl,
  kStartElement,
  kEndElement,
  kEmptyElement,
  kText,
  kCData,
  kComment,
  kProcessingInstruction,
  kEof,
};

struct Attribute {
  std::string qname;
  std::string value;  // entity references decoded
};

struct Event {
  EventType type = EventType::kEof;
  std::string qname;                   // start / end / empty element
  std::vector<Attribute> attributes;   // start / empty element
  std::string text;                    // kText (decoded) and kCData (raw)
  std::uint64_t begin = 0;             // first byte of the token
  std::uint64_t end = 0;               // one past the last byte
};

class Tokenizer {
 public:
  // Streaming over an open byte stream; offsets are absolute file positions
  // when `base_offset` is the stream position at construction.
  explicit Tokenizer(std::istream& in, std::uint64_t base_offset = 0);

  // In-memory input (no copy). Offsets are relative to the buffer start
  // unless a base offset is given.
  explicit Tokenizer(std::string_view data, std::uint64_t base_offset = 0);

  ~Tokenizer();
  Tokenizer(const Tokenizer&) = delete;
  Tokenizer& operator=(const Tokenizer&) = delete;

  // Returns the next token. Throws Errc::kScanError with the byte offset of
  // the offending input on any malformed construct.
  Event Next();

 private:
  struct Impl;
  Impl* impl_;
};

// One element of a namespace-resolved tree. Extents are absolute tokenizer
// offsets; content_* spans the bytes strictly between start and end tags.
struct Element {
  std::string qname;
  std::string prefix;   // empty when unprefixed
  std::string local;
  std::string ns_uri;   // resolved namespace URI; empty = no namespace
  std::vector<Attribute> attributes;
  std::vector<Element> children;        // element children, document order
  std::string text;                     // direct character data, decoded
  std::uint64_t begin = 0;
  std::uint64_t end = 0;
  std::uint64_t content_begin = 0;
  std::uint64_t content_end = 0;

  bool Is(std::string_view ns, std::string_view local_name) const {
    return ns_uri == ns && local == local_name;
  }
  const std::string* FindAttr(std::string_view attr_qname) const;
};

// Prefix environment for namespace resolution; one scope per open element.
class NsContext {
 public:
  NsContext();
  // Enters a scope, applying any xmlns / xmlns:* attributes. Throws on
  // illegal declarations (undeclaring a prefix, rebinding xml/xmlns).
  void Push(const std::vector<Attribute>& attributes, std::uint64_t offset);
  void Pop();
  // Resolves an element prefix ("" = default namespace).
  std::optional<std::string> Resolve(std::string_view prefix) const;

 private:
  struct Scope {
    std::vector<std::pair<std::string, std::string>> bindings;
  };
  std::vector<Scope> scopes_;
};

// Consumes events from `tok` until the element opened by `start` closes and
// returns the resolved subtree. `start` must be a kStartElement or
// kEmptyElement event that was just read.
Element BuildSubtree(Tokenizer& tok, const Event& start, NsContext& ns);

// Strict standalone parse: `data` must be exactly one element. The first
// byte is its '<', the last byte is the '>' of its end tag, no prolog, no
// surrounding whitespace. This is the shape every indexed byte extent
// slices out of a tape.
Element ParseStandaloneElement(std::string_view data,
                               std::uint64_t base_offset = 0);

// Serialization helpers. Text escaping covers & < > and carriage return;
// attribute escaping additionally covers quotes, tab and newline so that
// attribute-value normalization in conforming parsers cannot alter data.
std::string EscapeText(std::string_view s);
std::string EscapeAttr(std::string_view s);

// True when every byte is legal in XML character data once escaped
// (i.e. no control bytes other than tab, LF, CR).
bool IsXmlSafe(std::string_view s);

}  // namespace tapestore::xml

#endif  // TAPESTORE_XML_H_
