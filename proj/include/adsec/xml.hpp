#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adsec/errors.hpp"

namespace adsec {

// Minimal XML reader/writer covering the tree dialect: prolog, comments,
// elements with attributes, character data, and the five predefined
// entities plus numeric references. Positions are tracked for errors.

struct XmlNode {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<XmlNode> children;
  std::string text;  // concatenated character data
  std::size_t line = 0;
  std::size_t column = 0;

  const std::string* attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes)
      if (k == key) return &v;
    return nullptr;
  }
};

namespace detail {

class XmlParser {
 public:
  explicit XmlParser(std::string_view text) : text_(text) {}

  XmlNode parse_document() {
    skip_misc();
    if (!starts_with("<")) fail("expected root element");
    XmlNode root = parse_element();
    skip_misc();
    if (pos_ != text_.size()) fail("content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, col_);
  }

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  char next() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  bool starts_with(std::string_view s) const {
    return text_.substr(pos_, s.size()) == s;
  }

  void expect(std::string_view s) {
    if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
    for (std::size_t i = 0; i < s.size(); ++i) next();
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n'))
      next();
  }

  // Whitespace, the prolog, doctype, comments and processing instructions.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<?") || starts_with("<!")) {
        if (starts_with("<!--")) {
          expect("<!--");
          while (!eof() && !starts_with("-->")) next();
          if (eof()) fail("unterminated comment");
          expect("-->");
        } else {
          while (!eof() && peek() != '>') next();
          if (eof()) fail("unterminated declaration");
          next();
        }
        continue;
      }
      return;
    }
  }

  static bool name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-' || c == '.' || c == ':';
  }

  std::string parse_name() {
    std::string name;
    while (!eof() && name_char(peek())) name += next();
    if (name.empty()) fail("expected a name");
    return name;
  }

  std::string parse_entity() {
    expect("&");
    std::string ref;
    while (!eof() && peek() != ';') ref += next();
    if (eof()) fail("unterminated entity reference");
    next();
    if (ref == "lt") return "<";
    if (ref == "gt") return ">";
    if (ref == "amp") return "&";
    if (ref == "quot") return "\"";
    if (ref == "apos") return "'";
    if (!ref.empty() && ref[0] == '#') {
      int base = 10;
      std::string digits = ref.substr(1);
      if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
        base = 16;
        digits = digits.substr(1);
      }
      try {
        unsigned long code = std::stoul(digits, nullptr, base);
        if (code == 0 || code > 0x10FFFF) fail("character reference out of range");
        return encode_utf8(static_cast<unsigned long>(code));
      } catch (const std::logic_error&) {
        fail("malformed character reference '&" + ref + ";'");
      }
    }
    fail("unknown entity '&" + ref + ";'");
  }

  static std::string encode_utf8(unsigned long cp) {
    std::string out;
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
    return out;
  }

  std::string parse_attr_value() {
    if (eof() || (peek() != '"' && peek() != '\'')) fail("expected attribute value");
    char quote = next();
    std::string value;
    while (!eof() && peek() != quote) {
      if (peek() == '&')
        value += parse_entity();
      else if (peek() == '<')
        fail("'<' in attribute value");
      else
        value += next();
    }
    if (eof()) fail("unterminated attribute value");
    next();
    return value;
  }

  XmlNode parse_element() {
    XmlNode node;
    node.line = line_;
    node.column = col_;
    expect("<");
    node.name = parse_name();
    for (;;) {
      skip_ws();
      if (eof()) fail("unterminated element '" + node.name + "'");
      if (starts_with("/>")) {
        expect("/>");
        return node;
      }
      if (peek() == '>') {
        next();
        break;
      }
      std::string key = parse_name();
      skip_ws();
      expect("=");
      skip_ws();
      node.attributes.emplace_back(key, parse_attr_value());
    }
    // Content until the matching end tag.
    for (;;) {
      if (eof()) fail("missing end tag for '" + node.name + "'");
      if (starts_with("</")) {
        expect("</");
        std::string closing = parse_name();
        if (closing != node.name)
          fail("end tag '" + closing + "' does not match '" + node.name + "'");
        skip_ws();
        expect(">");
        return node;
      }
      if (starts_with("<!--")) {
        expect("<!--");
        while (!eof() && !starts_with("-->")) next();
        if (eof()) fail("unterminated comment");
        expect("-->");
        continue;
      }
      if (peek() == '<') {
        node.children.push_back(parse_element());
        continue;
      }
      if (peek() == '&') {
        node.text += parse_entity();
        continue;
      }
      node.text += next();
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

}  // namespace detail

inline XmlNode parse_xml(std::string_view text) {
  return detail::XmlParser(text).parse_document();
}

inline std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c; break;
    }
  }
  return out;
}

}  // namespace adsec
