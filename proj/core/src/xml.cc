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

#include "tapestore/xml.h"

#include <cstring>

#include "tapestore/error.h"

namespace tapestore::xml {

namespace {

constexpr std::string_view kXmlNsUri = "http://www.w3.org/XML/1998/namespace";
constexpr std::string_view kXmlnsNsUri = "http://www.w3.org/2000/xmlns/";

[[noreturn]] void Fail(const std::string& message, std::uint64_t offset) {
  throw Error(Errc::kScanError, message, offset);
}

bool IsWhitespaceByte(int c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

bool IsNameStartByte(int c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         c == ':' || c >= 0x80;
}

bool IsNameByte(int c) {
  return IsNameStartByte(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

void AppendUtf8(std::string* out, std::uint32_t cp) {
  if (cp < 0x80) {
    out->push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out->push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out->push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out->push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

bool IsXmlChar(std::uint32_t cp) {
  return cp == 0x09 || cp == 0x0a || cp == 0x0d ||
         (cp >= 0x20 && cp <= 0xd7ff) || (cp >= 0xe000 && cp <= 0xfffd) ||
         (cp >= 0x10000 && cp <= 0x10ffff);
}

}  // namespace

// ---------------------------------------------------------------------------
// Tokenizer

struct Tokenizer::Impl {
  std::istream* in = nullptr;
  std::string_view view;
  bool streaming = false;

  std::string buffer;        // unconsumed window (streaming mode)
  std::size_t buf_pos = 0;
  std::size_t view_pos = 0;
  std::uint64_t consumed = 0;  // absolute offset of the next unread byte
  bool saw_first_token = false;

  static constexpr std::size_t kChunk = 1 << 16;

  // Ensures at least `ahead + 1` bytes are buffered; returns false on EOF.
  bool Ensure(std::size_t ahead) {
    if (!streaming) return view_pos + ahead < view.size();
    while (buffer.size() - buf_pos <= ahead) {
      if (buf_pos > kChunk) {
        buffer.erase(0, buf_pos);
        buf_pos = 0;
      }
      const std::size_t old = buffer.size();
      buffer.resize(old + kChunk);
      in->read(buffer.data() + old, static_cast<std::streamsize>(kChunk));
      const std::size_t got = static_cast<std::size_t>(in->gcount());
      buffer.resize(old + got);
      if (got == 0) return false;
    }
    return true;
  }

  int Peek(std::size_t ahead = 0) {
    if (!Ensure(ahead)) return -1;
    if (streaming) {
      return static_cast<unsigned char>(buffer[buf_pos + ahead]);
    }
    return static_cast<unsigned char>(view[view_pos + ahead]);
  }

  bool LookingAt(std::string_view s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (Peek(i) != static_cast<unsigned char>(s[i])) return false;
    }
    return true;
  }

  int Get() {
    const int c = Peek();
    if (c >= 0) {
      if (streaming) {
        ++buf_pos;
      } else {
        ++view_pos;
      }
      ++consumed;
    }
    return c;
  }

  void Skip(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) Get();
  }

  std::uint64_t pos() const { return consumed; }

  // Consumes one character-reference or UTF-8 validation unit into `out`.
  // `c` is the byte already consumed.
  void ConsumeUtf8Tail(int lead, std::string* out) {
    int len = 0;
    std::uint32_t cp = 0;
    if ((lead & 0xe0) == 0xc0) {
      len = 1;
      cp = lead & 0x1f;
    } else if ((lead & 0xf0) == 0xe0) {
      len = 2;
      cp = lead & 0x0f;
    } else if ((lead & 0xf8) == 0xf0) {
      len = 3;
      cp = lead & 0x07;
    } else {
      Fail("invalid UTF-8 lead byte", pos() - 1);
    }
    out->push_back(static_cast<char>(lead));
    for (int i = 0; i < len; ++i) {
      const int c = Get();
      if (c < 0 || (c & 0xc0) != 0x80) {
        Fail("truncated UTF-8 sequence", pos() - (c < 0 ? 0 : 1));
      }
      cp = (cp << 6) | static_cast<std::uint32_t>(c & 0x3f);
      out->push_back(static_cast<char>(c));
    }
    static const std::uint32_t kMin[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) {
      Fail("invalid UTF-8 sequence", pos() - len - 1);
    }
    if (!IsXmlChar(cp)) Fail("character not allowed in XML", pos() - len - 1);
  }

  std::string ReadName() {
    const std::uint64_t at = pos();
    int c = Peek();
    if (c < 0 || !IsNameStartByte(c)) Fail("expected a name", at);
    std::string name;
    while (true) {
      c = Peek();
      if (c < 0 || !IsNameByte(c)) break;
      Get();
      if (c >= 0x80) {
        ConsumeUtf8Tail(c, &name);
      } else {
        name.push_back(static_cast<char>(c));
      }
    }
    return name;
  }

  void SkipWhitespace() {
    while (IsWhitespaceByte(Peek())) Get();
  }

  void Expect(char c, const char* what) {
    const std::uint64_t at = pos();
    if (Get() != static_cast<unsigned char>(c)) Fail(what, at);
  }

  // Decodes one reference after the consumed '&'.
  void ReadReference(std::string* out) {
    const std::uint64_t at = pos() - 1;
    if (Peek() == '#') {
      Get();
      std::uint32_t cp = 0;
      bool any = false;
      if (Peek() == 'x') {
        Get();
        while (true) {
          const int c = Peek();
          int v;
          if (c >= '0' && c <= '9') {
            v = c - '0';
          } else if (c >= 'a' && c <= 'f') {
            v = c - 'a' + 10;
          } else if (c >= 'A' && c <= 'F') {
            v = c - 'A' + 10;
          } else {
            break;
          }
          Get();
          any = true;
          if (cp > 0x10ffff) cp = 0x110000;  // clamp, reject below
          cp = cp * 16 + static_cast<std::uint32_t>(v);
        }
      } else {
        while (Peek() >= '0' && Peek() <= '9') {
          cp = cp * 10 + static_cast<std::uint32_t>(Get() - '0');
          any = true;
          if (cp > 0x10ffff) cp = 0x110000;
        }
      }
      if (!any || Get() != ';') Fail("malformed character reference", at);
      if (!IsXmlChar(cp)) Fail("character reference out of range", at);
      AppendUtf8(out, cp);
      return;
    }
    const std::string name = ReadName();
    if (Get() != ';') Fail("entity reference missing ';'", at);
    if (name == "amp") {
      out->push_back('&');
    } else if (name == "lt") {
      out->push_back('<');
    } else if (name == "gt") {
      out->push_back('>');
    } else if (name == "quot") {
      out->push_back('"');
    } else if (name == "apos") {
      out->push_back('\'');
    } else {
      Fail("unknown entity '&" + name + ";'", at);
    }
  }

  std::string ReadAttrValue() {
    const std::uint64_t at = pos();
    const int quote = Get();
    if (quote != '"' && quote != '\'') Fail("expected quoted value", at);
    std::string value;
    while (true) {
      const int c = Get();
      if (c < 0) Fail("unterminated attribute value", pos());
      if (c == quote) break;
      if (c == '<') Fail("'<' not allowed in attribute value", pos() - 1);
      if (c == '&') {
        ReadReference(&value);
      } else if (c >= 0x80) {
        ConsumeUtf8Tail(c, &value);
      } else {
        if (c < 0x20 && c != '\t' && c != '\n' && c != '\r') {
          Fail("control byte in attribute value", pos() - 1);
        }
        value.push_back(static_cast<char>(c));
      }
    }
    return value;
  }

  Event ReadTag() {
    Event ev;
    ev.begin = pos();
    Get();  // '<'
    int c = Peek();
    if (c == '/') {
      Get();
      ev.type = EventType::kEndElement;
      ev.qname = ReadName();
      SkipWhitespace();
      Expect('>', "malformed end tag");
      ev.end = pos();
      return ev;
    }
    ev.type = EventType::kStartElement;
    ev.qname = ReadName();
    while (true) {
      const bool had_ws = IsWhitespaceByte(Peek());
      SkipWhitespace();
      c = Peek();
      if (c < 0) Fail("unterminated start tag", pos());
      if (c == '>') {
        Get();
        break;
      }
      if (c == '/') {
        Get();
        Expect('>', "expected '>' after '/'");
        ev.type = EventType::kEmptyElement;
        break;
      }
      if (!had_ws) Fail("expected whitespace before attribute", pos());
      Attribute attr;
      const std::uint64_t attr_at = pos();
      attr.qname = ReadName();
      SkipWhitespace();
      Expect('=', "expected '=' after attribute name");
      SkipWhitespace();
      attr.value = ReadAttrValue();
      for (const Attribute& existing : ev.attributes) {
        if (existing.qname == attr.qname) {
          Fail("duplicate attribute '" + attr.qname + "'", attr_at);
        }
      }
      ev.attributes.push_back(std::move(attr));
    }
    ev.end = pos();
    return ev;
  }

  Event ReadText() {
    Event ev;
    ev.type = EventType::kText;
    ev.begin = pos();
    while (true) {
      const int c = Peek();
      if (c < 0 || c == '<') break;
      Get();
      if (c == '&') {
        ReadReference(&ev.text);
      } else if (c == ']') {
        // "]]>" must not appear in character data.
        if (Peek() == ']' && Peek(1) == '>') {
          Fail("']]>' not allowed in character data", pos() - 1);
        }
        ev.text.push_back(']');
      } else if (c >= 0x80) {
        ConsumeUtf8Tail(c, &ev.text);
      } else {
        if (c < 0x20 && c != '\t' && c != '\n' && c != '\r') {
          Fail("control byte in character data", pos() - 1);
        }
        ev.text.push_back(static_cast<char>(c));
      }
    }
    ev.end = pos();
    return ev;
  }

  Event ReadCData() {
    Event ev;
    ev.type = EventType::kCData;
    ev.begin = pos();
    Skip(9);  // <![CDATA[
    while (true) {
      if (Peek() < 0) Fail("unterminated CDATA section", pos());
      if (Peek() == ']' && Peek(1) == ']' && Peek(2) == '>') {
        Skip(3);
        break;
      }
      const int c = Get();
      if (c >= 0x80) {
        ConsumeUtf8Tail(c, &ev.text);
      } else {
        if (c < 0x20 && c != '\t' && c != '\n' && c != '\r') {
          Fail("control byte in CDATA", pos() - 1);
        }
        ev.text.push_back(static_cast<char>(c));
      }
    }
    ev.end = pos();
    return ev;
  }

  Event ReadComment() {
    Event ev;
    ev.type = EventType::kComment;
    ev.begin = pos();
    Skip(4);  // <!--
    while (true) {
      if (Peek() < 0) Fail("unterminated comment", pos());
      if (Peek() == '-' && Peek(1) == '-') {
        if (Peek(2) != '>') Fail("'--' not allowed inside comment", pos());
        Skip(3);
        break;
      }
      const int c = Get();
      if (c >= 0x80) {
        ConsumeUtf8Tail(c, &ev.text);
      } else {
        ev.text.push_back(static_cast<char>(c));
      }
    }
    ev.end = pos();
    return ev;
  }

  Event ReadProcessingInstruction(bool allow_decl) {
    Event ev;
    ev.begin = pos();
    Skip(2);  // <?
    const std::string target = ReadName();
    if (target == "xml") {
      if (!allow_decl) Fail("XML declaration only allowed at start", ev.begin);
      ev.type = EventType::kXmlDecl;
    } else {
      ev.type = EventType::kProcessingInstruction;
    }
    ev.qname = target;
    while (true) {
      if (Peek() < 0) Fail("unterminated processing instruction", pos());
      if (Peek() == '?' && Peek(1) == '>') {
        Skip(2);
        break;
      }
      const int c = Get();
      if (c >= 0x80) {
        ConsumeUtf8Tail(c, &ev.text);
      } else {
        ev.text.push_back(static_cast<char>(c));
      }
    }
    ev.end = pos();
    return ev;
  }

  Event Next() {
    const int c = Peek();
    if (c < 0) {
      Event ev;
      ev.type = EventType::kEof;
      ev.begin = ev.end = pos();
      return ev;
    }
    const bool first = !saw_first_token;
    saw_first_token = true;
    if (c != '<') return ReadText();
    const int c1 = Peek(1);
    if (c1 == '?') return ReadProcessingInstruction(first && pos() == 0);
    if (c1 == '!') {
      if (LookingAt("<!--")) return ReadComment();
      if (LookingAt("<![CDATA[")) return ReadCData();
      Fail("unsupported markup (DOCTYPE is not accepted)", pos());
    }
    return ReadTag();
  }
};

Tokenizer::Tokenizer(std::istream& in, std::uint64_t base_offset)
    : impl_(new Impl) {
  impl_->in = &in;
  impl_->streaming = true;
  impl_->consumed = base_offset;
}

Tokenizer::Tokenizer(std::string_view data, std::uint64_t base_offset)
    : impl_(new Impl) {
  impl_->view = data;
  impl_->streaming = false;
  impl_->consumed = base_offset;
}

Tokenizer::~Tokenizer() {
  delete impl_;
}

Event Tokenizer::Next() {
  return impl_->Next();
}

// ---------------------------------------------------------------------------
// Namespace resolution and tree building

NsContext::NsContext() {
  Scope root;
  root.bindings.emplace_back("xml", std::string(kXmlNsUri));
  root.bindings.emplace_back("", "");  // default namespace: none
  scopes_.push_back(std::move(root));
}

void NsContext::Push(const std::vector<Attribute>& attributes,
                     std::uint64_t offset) {
  Scope scope;
  for (const Attribute& attr : attributes) {
    if (attr.qname == "xmlns") {
      scope.bindings.emplace_back("", attr.value);
    } else if (attr.qname.rfind("xmlns:", 0) == 0) {
      const std::string prefix = attr.qname.substr(6);
      if (prefix.empty()) {
        throw Error(Errc::kScanError, "malformed xmlns declaration", offset);
      }
      if (prefix == "xmlns") {
        throw Error(Errc::kScanError, "prefix 'xmlns' cannot be declared",
                    offset);
      }
      if (prefix == "xml" && attr.value != kXmlNsUri) {
        throw Error(Errc::kScanError, "prefix 'xml' is reserved", offset);
      }
      if (attr.value.empty()) {
        throw Error(Errc::kScanError,
                    "prefix '" + prefix + "' cannot be undeclared", offset);
      }
      scope.bindings.emplace_back(prefix, attr.value);
    }
  }
  scopes_.push_back(std::move(scope));
}

void NsContext::Pop() {
  scopes_.pop_back();
}

std::optional<std::string> NsContext::Resolve(std::string_view prefix) const {
  if (prefix == "xmlns") return std::string(kXmlnsNsUri);
  for (auto scope = scopes_.rbegin(); scope != scopes_.rend(); ++scope) {
    for (auto it = scope->bindings.rbegin(); it != scope->bindings.rend();
         ++it) {
      if (it->first == prefix) return it->second;
    }
  }
  return std::nullopt;
}

const std::string* Element::FindAttr(std::string_view attr_qname) const {
  for (const Attribute& attr : attributes) {
    if (attr.qname == attr_qname) return &attr.value;
  }
  return nullptr;
}

namespace {

void SplitQName(const std::string& qname, std::uint64_t offset,
                std::string* prefix, std::string* local) {
  const std::size_t colon = qname.find(':');
  if (colon == std::string::npos) {
    prefix->clear();
    *local = qname;
  } else {
    *prefix = qname.substr(0, colon);
    *local = qname.substr(colon + 1);
    if (prefix->empty() || local->empty() ||
        local->find(':') != std::string::npos) {
      throw Error(Errc::kScanError, "malformed QName '" + qname + "'", offset);
    }
  }
}

}  // namespace

Element BuildSubtree(Tokenizer& tok, const Event& start, NsContext& ns) {
  Element elem;
  elem.qname = start.qname;
  elem.begin = start.begin;
  elem.attributes = start.attributes;
  ns.Push(start.attributes, start.begin);
  SplitQName(elem.qname, start.begin, &elem.prefix, &elem.local);
  const auto uri = ns.Resolve(elem.prefix);
  if (!uri) {
    throw Error(Errc::kScanError, "undeclared prefix '" + elem.prefix + "'",
                start.begin);
  }
  elem.ns_uri = *uri;

  // Prefixed attributes must also resolve.
  for (const Attribute& attr : elem.attributes) {
    const std::size_t colon = attr.qname.find(':');
    if (colon == std::string::npos || attr.qname.rfind("xmlns", 0) == 0) {
      continue;
    }
    const std::string prefix = attr.qname.substr(0, colon);
    if (!ns.Resolve(prefix)) {
      throw Error(Errc::kScanError,
                  "undeclared attribute prefix '" + prefix + "'", start.begin);
    }
  }

  if (start.type == EventType::kEmptyElement) {
    elem.end = start.end;
    elem.content_begin = elem.content_end = start.end;
    ns.Pop();
    return elem;
  }

  elem.content_begin = start.end;
  while (true) {
    const Event ev = tok.Next();
    switch (ev.type) {
      case EventType::kText:
      case EventType::kCData:
        elem.text += ev.text;
        break;
      case EventType::kStartElement:
      case EventType::kEmptyElement:
        elem.children.push_back(BuildSubtree(tok, ev, ns));
        break;
      case EventType::kEndElement:
        if (ev.qname != elem.qname) {
          throw Error(Errc::kScanError,
                      "end tag '" + ev.qname + "' does not match '" +
                          elem.qname + "'",
                      ev.begin);
        }
        elem.content_end = ev.begin;
        elem.end = ev.end;
        ns.Pop();
        return elem;
      case EventType::kComment:
      case EventType::kProcessingInstruction:
        break;
      case EventType::kXmlDecl:
        throw Error(Errc::kScanError, "XML declaration inside content",
                    ev.begin);
      case EventType::kEof:
        throw Error(Errc::kScanError,
                    "input ended inside element '" + elem.qname + "'", ev.end);
    }
  }
}

Element ParseStandaloneElement(std::string_view data,
                               std::uint64_t base_offset) {
  Tokenizer tok(data, base_offset);
  const Event first = tok.Next();
  if (first.type != EventType::kStartElement &&
      first.type != EventType::kEmptyElement) {
    throw Error(Errc::kScanError, "expected an element at the first byte",
                first.begin);
  }
  NsContext ns;
  Element root = BuildSubtree(tok, first, ns);
  const Event after = tok.Next();
  if (after.type != EventType::kEof) {
    throw Error(Errc::kScanError, "trailing data after element", after.begin);
  }
  return root;
}

// ---------------------------------------------------------------------------
// Serialization helpers

std::string EscapeText(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '\r':
        out += "&#13;";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

std::string EscapeAttr(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\t':
        out += "&#9;";
        break;
      case '\n':
        out += "&#10;";
        break;
      case '\r':
        out += "&#13;";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

bool IsXmlSafe(std::string_view s) {
  for (const char c : s) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (u < 0x20 && c != '\t' && c != '\n' && c != '\r') return false;
  }
  return true;
}

}  // namespace tapestore::xml
