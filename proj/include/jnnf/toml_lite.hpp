// Reader for the slice of TOML the config files actually use: bare keys,
// basic strings, integers, booleans, single-line and multi-line arrays,
// inline tables, [table] headers and [[array-of-tables]] headers. Floats,
// dates, dotted keys and multi-line strings are rejected with an error that
// names the line. Tables keep their keys sorted, which is what makes the
// downstream canonical serializations deterministic.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jnnf/error.hpp"

namespace jnnf {

struct TomlValue {
  enum class Kind { String, Integer, Boolean, Array, Table };

  Kind kind = Kind::Table;
  std::string str;
  int64_t num = 0;
  bool flag = false;
  std::vector<TomlValue> arr;
  std::map<std::string, TomlValue> tab;

  static TomlValue make_string(std::string s) {
    TomlValue v;
    v.kind = Kind::String;
    v.str = std::move(s);
    return v;
  }
  static TomlValue make_integer(int64_t n) {
    TomlValue v;
    v.kind = Kind::Integer;
    v.num = n;
    return v;
  }
  static TomlValue make_boolean(bool b) {
    TomlValue v;
    v.kind = Kind::Boolean;
    v.flag = b;
    return v;
  }
  static TomlValue make_array() {
    TomlValue v;
    v.kind = Kind::Array;
    return v;
  }

  bool is_string() const { return kind == Kind::String; }
  bool is_integer() const { return kind == Kind::Integer; }
  bool is_boolean() const { return kind == Kind::Boolean; }
  bool is_array() const { return kind == Kind::Array; }
  bool is_table() const { return kind == Kind::Table; }

  const char* kind_name() const {
    switch (kind) {
      case Kind::String: return "string";
      case Kind::Integer: return "integer";
      case Kind::Boolean: return "boolean";
      case Kind::Array: return "array";
      case Kind::Table: return "table";
    }
    return "value";
  }

  // Null when the key is absent; throws when called on a non-table.
  const TomlValue* find(const std::string& key) const {
    require(is_table(), "toml: find on a non-table value");
    auto it = tab.find(key);
    return it == tab.end() ? nullptr : &it->second;
  }
};

namespace detail {

class TomlReader {
 public:
  explicit TomlReader(std::string_view text) : text_(text) {}

  TomlValue parse() {
    TomlValue root;
    TomlValue* current = &root;
    for (;;) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        current = parse_header(root);
      } else {
        parse_key_value(*current);
        end_of_line();
      }
    }
    return root;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  uint32_t line_ = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    throw error("toml line " + std::to_string(line_) + ": " + msg);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  char take() {
    char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  // Space and tabs only; newlines are significant at statement level.
  void skip_inline_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
    if (!at_end() && peek() == '#') {
      while (!at_end() && peek() != '\n') ++pos_;
    }
  }

  void skip_blank_lines() {
    for (;;) {
      skip_inline_ws();
      if (at_end() || peek() != '\n') return;
      take();
    }
  }

  // Inside arrays newlines act as ordinary whitespace.
  void skip_ws_and_newlines() {
    for (;;) {
      skip_inline_ws();
      if (at_end() || peek() != '\n') return;
      take();
    }
  }

  void end_of_line() {
    skip_inline_ws();
    if (at_end()) return;
    if (peek() != '\n') fail("unexpected trailing content");
    take();
  }

  static bool bare_key_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-';
  }

  std::string parse_key() {
    skip_inline_ws();
    if (at_end()) fail("expected a key");
    if (peek() == '"') return parse_basic_string();
    std::string key;
    while (!at_end() && bare_key_char(peek())) key.push_back(take());
    if (key.empty()) fail("expected a key");
    if (!at_end() && peek() == '.') fail("dotted keys are not supported");
    return key;
  }

  std::string parse_basic_string() {
    take();  // opening quote
    std::string out;
    for (;;) {
      if (at_end()) fail("unterminated string");
      char c = take();
      if (c == '"') return out;
      if (c == '\n') fail("unterminated string");
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (at_end()) fail("unterminated string");
      char e = take();
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case '/': out.push_back('/'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        default: fail(std::string("unsupported escape '\\") + e + "'");
      }
    }
  }

  TomlValue parse_integer() {
    std::string digits;
    if (peek() == '+' || peek() == '-') digits.push_back(take());
    while (!at_end() && peek() >= '0' && peek() <= '9') digits.push_back(take());
    if (digits.empty() || digits.back() == '+' || digits.back() == '-') fail("expected a number");
    if (!at_end() && (peek() == '.' || peek() == 'e' || peek() == 'E'))
      fail("floating point values are not supported");
    try {
      return TomlValue::make_integer(std::stoll(digits));
    } catch (const std::exception&) {
      fail("integer out of range: " + digits);
    }
  }

  TomlValue parse_value() {
    skip_inline_ws();
    if (at_end()) fail("expected a value");
    char c = peek();
    if (c == '"') return TomlValue::make_string(parse_basic_string());
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    if (c == '-' || c == '+' || (c >= '0' && c <= '9')) return parse_integer();
    if (text_.compare(pos_, 4, "true") == 0 && boundary_at(pos_ + 4)) {
      pos_ += 4;
      return TomlValue::make_boolean(true);
    }
    if (text_.compare(pos_, 5, "false") == 0 && boundary_at(pos_ + 5)) {
      pos_ += 5;
      return TomlValue::make_boolean(false);
    }
    fail("unrecognized value");
  }

  bool boundary_at(std::size_t p) const { return p >= text_.size() || !bare_key_char(text_[p]); }

  TomlValue parse_array() {
    take();  // '['
    TomlValue arr = TomlValue::make_array();
    for (;;) {
      skip_ws_and_newlines();
      if (at_end()) fail("unterminated array");
      if (peek() == ']') {
        take();
        return arr;
      }
      arr.arr.push_back(parse_value());
      skip_ws_and_newlines();
      if (at_end()) fail("unterminated array");
      if (peek() == ',') {
        take();
        continue;
      }
      if (peek() == ']') {
        take();
        return arr;
      }
      fail("expected ',' or ']' in array");
    }
  }

  TomlValue parse_inline_table() {
    take();  // '{'
    TomlValue tab;
    for (;;) {
      skip_ws_and_newlines();
      if (at_end()) fail("unterminated inline table");
      if (peek() == '}') {
        take();
        return tab;
      }
      parse_key_value(tab);
      skip_ws_and_newlines();
      if (at_end()) fail("unterminated inline table");
      if (peek() == ',') {
        take();
        continue;
      }
      if (peek() == '}') {
        take();
        return tab;
      }
      fail("expected ',' or '}' in inline table");
    }
  }

  void parse_key_value(TomlValue& into) {
    std::string key = parse_key();
    skip_inline_ws();
    if (at_end() || peek() != '=') fail("expected '=' after key '" + key + "'");
    take();
    if (into.tab.count(key)) fail("duplicate key '" + key + "'");
    into.tab.emplace(std::move(key), parse_value());
  }

  TomlValue* parse_header(TomlValue& root) {
    take();  // '['
    const bool array_of_tables = !at_end() && peek() == '[';
    if (array_of_tables) take();
    std::string name = parse_key();
    skip_inline_ws();
    if (array_of_tables) {
      if (at_end() || take() != ']' || at_end() || take() != ']')
        fail("expected ']]' to close the header");
    } else {
      if (at_end() || take() != ']') fail("expected ']' to close the header");
    }
    end_of_line();

    auto it = root.tab.find(name);
    if (array_of_tables) {
      if (it == root.tab.end())
        it = root.tab.emplace(std::move(name), TomlValue::make_array()).first;
      else if (!it->second.is_array())
        fail("'" + name + "' is already a " + std::string(it->second.kind_name()));
      it->second.arr.emplace_back();
      return &it->second.arr.back();
    }
    if (it == root.tab.end()) return &root.tab.emplace(std::move(name), TomlValue()).first->second;
    if (!it->second.is_table())
      fail("'" + name + "' is already a " + std::string(it->second.kind_name()));
    return &it->second;
  }
};

}  // namespace detail

inline TomlValue parse_toml(std::string_view text) { return detail::TomlReader(text).parse(); }

}  // namespace jnnf
