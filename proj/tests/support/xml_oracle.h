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

#ifndef TAPESTORE_TESTS_SUPPORT_XML_ORACLE_H_
#define TAPESTORE_TESTS_SUPPORT_XML_ORACLE_H_

// Independent XML oracle built on rapidxml (shipped inside Boost). It shares
// no code with the library's tokenizer or write path, so tests can use it to
// check well-formedness and to census records without circularity.

#include <boost/property_tree/detail/rapidxml.hpp>

#include <cstring>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace test_support {

namespace rx = boost::property_tree::detail::rapidxml;

inline bool OracleWellFormed(std::string xml) {
  std::vector<char> buf(xml.begin(), xml.end());
  buf.push_back('\0');
  rx::xml_document<> doc;
  try {
    doc.parse<rx::parse_validate_closing_tags>(buf.data());
    return doc.first_node() != nullptr;
  } catch (const rx::parse_error&) {
    return false;
  }
}

// Counts direct children of the root element whose local name matches,
// resolving the prefix against xmlns declarations on the child and root.
inline std::optional<std::size_t> OracleCountRootChildren(
    std::string xml, std::string_view ns_uri, std::string_view local) {
  std::vector<char> buf(xml.begin(), xml.end());
  buf.push_back('\0');
  rx::xml_document<> doc;
  try {
    doc.parse<rx::parse_validate_closing_tags | rx::parse_no_data_nodes>(
        buf.data());
  } catch (const rx::parse_error&) {
    return std::nullopt;
  }
  rx::xml_node<>* root = doc.first_node();
  if (root == nullptr) return std::nullopt;

  const auto resolve = [](rx::xml_node<>* node,
                          std::string_view prefix) -> std::string_view {
    for (rx::xml_node<>* cur = node; cur != nullptr; cur = cur->parent()) {
      if (cur->type() != rx::node_element) continue;
      for (rx::xml_attribute<>* attr = cur->first_attribute(); attr;
           attr = attr->next_attribute()) {
        const std::string_view name(attr->name(), attr->name_size());
        if (prefix.empty() && name == "xmlns") {
          return std::string_view(attr->value(), attr->value_size());
        }
        if (!prefix.empty() && name.rfind("xmlns:", 0) == 0 &&
            name.substr(6) == prefix) {
          return std::string_view(attr->value(), attr->value_size());
        }
      }
    }
    return {};
  };

  std::size_t count = 0;
  for (rx::xml_node<>* child = root->first_node(); child != nullptr;
       child = child->next_sibling()) {
    if (child->type() != rx::node_element) continue;
    const std::string_view qname(child->name(), child->name_size());
    const std::size_t colon = qname.find(':');
    const std::string_view prefix =
        colon == std::string_view::npos ? std::string_view()
                                        : qname.substr(0, colon);
    const std::string_view child_local =
        colon == std::string_view::npos ? qname : qname.substr(colon + 1);
    if (child_local == local && resolve(child, prefix) == ns_uri) ++count;
  }
  return count;
}

}  // namespace test_support

#endif  // TAPESTORE_TESTS_SUPPORT_XML_ORACLE_H_
