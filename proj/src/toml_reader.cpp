#include "perishfair/toml_reader.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <vector>

#include "perishfair/error.hpp"

namespace perishfair {
namespace {

using nlohmann::json;

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  json run() {
    json root = json::object();
    json* current = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        current = header(root);
      } else {
        key_value(*current);
      }
      end_of_line();
    }
    return root;
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kParse, "toml line " + std::to_string(line_) + ": " + what);
  }

  bool eof() const { return i_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[i_]; }
  char get() {
    const char c = s_[i_++];
    if (c == '\n') ++line_;
    return c;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++i_;
  }
  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') ++i_;
    }
  }
  // Whitespace, comments and newlines (inside arrays and between statements).
  void skip_blank_lines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        get();
      } else {
        break;
      }
    }
  }
  void end_of_line() {
    skip_ws();
    skip_comment();
    if (peek() == '\r') ++i_;
    if (eof()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    get();
  }

  std::string bare_or_quoted_key() {
    skip_ws();
    if (peek() == '"' || peek() == '\'') return string_value();
    std::string k;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) {
      k.push_back(get());
    }
    if (k.empty()) fail("expected a key");
    return k;
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> parts{bare_or_quoted_key()};
    skip_ws();
    while (peek() == '.') {
      ++i_;
      parts.push_back(bare_or_quoted_key());
      skip_ws();
    }
    return parts;
  }

  json* descend(json* node, const std::string& key) {
    json& child = (*node)[key];
    if (child.is_null()) child = json::object();
    if (child.is_array() && !child.empty() && child.back().is_object()) return &child.back();
    if (!child.is_object()) fail("key '" + key + "' is not a table");
    return &child;
  }

  json* header(json& root) {
    ++i_;
    const bool array = peek() == '[';
    if (array) ++i_;
    const auto parts = dotted_key();
    if (peek() != ']') fail("expected ']'");
    ++i_;
    if (array) {
      if (peek() != ']') fail("expected ']]'");
      ++i_;
    }
    json* node = &root;
    for (std::size_t k = 0; k + 1 < parts.size(); ++k) node = descend(node, parts[k]);
    json& leaf = (*node)[parts.back()];
    if (array) {
      if (leaf.is_null()) leaf = json::array();
      if (!leaf.is_array()) fail("'" + parts.back() + "' is not an array of tables");
      leaf.push_back(json::object());
      return &leaf.back();
    }
    if (leaf.is_null()) leaf = json::object();
    if (!leaf.is_object()) fail("'" + parts.back() + "' redefined as a table");
    return &leaf;
  }

  void key_value(json& table) {
    const auto parts = dotted_key();
    skip_ws();
    if (peek() != '=') fail("expected '='");
    ++i_;
    skip_ws();
    json* node = &table;
    for (std::size_t k = 0; k + 1 < parts.size(); ++k) node = descend(node, parts[k]);
    if (node->contains(parts.back())) fail("duplicate key '" + parts.back() + "'");
    (*node)[parts.back()] = value();
  }

  json value() {
    skip_ws();
    const char c = peek();
    if (c == '"' || c == '\'') return string_value();
    if (c == '[') return array_value();
    if (c == '{') return inline_table();
    if (s_.compare(i_, 4, "true") == 0) {
      i_ += 4;
      return true;
    }
    if (s_.compare(i_, 5, "false") == 0) {
      i_ += 5;
      return false;
    }
    return number_value();
  }

  std::string string_value() {
    const char q = get();
    if (s_.compare(i_, 2, std::string(2, q)) == 0) fail("multi-line strings are not supported");
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == q) break;
      if (q == '"' && c == '\\') {
        if (eof()) fail("unterminated escape");
        const char e = get();
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else {
        out.push_back(c);
      }
    }
    return out;
  }

  json array_value() {
    ++i_;
    json arr = json::array();
    while (true) {
      skip_blank_lines();
      if (peek() == ']') {
        ++i_;
        return arr;
      }
      arr.push_back(value());
      skip_blank_lines();
      if (peek() == ',') {
        ++i_;
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  json inline_table() {
    ++i_;
    json obj = json::object();
    skip_ws();
    if (peek() == '}') {
      ++i_;
      return obj;
    }
    while (true) {
      key_value(obj);
      skip_ws();
      if (peek() == ',') {
        ++i_;
        continue;
      }
      if (peek() == '}') {
        ++i_;
        return obj;
      }
      fail("expected ',' or '}' in inline table");
    }
  }

  json number_value() {
    std::string tok;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                      peek() == '.' || peek() == '_')) {
      const char c = get();
      if (c != '_') tok.push_back(c);
    }
    if (tok.empty()) fail("expected a value");
    std::string body = tok;
    double sign = 1.0;
    if (body[0] == '+' || body[0] == '-') {
      sign = body[0] == '-' ? -1.0 : 1.0;
      body.erase(0, 1);
    }
    if (body == "inf") return sign * std::numeric_limits<double>::infinity();
    if (body == "nan") return std::numeric_limits<double>::quiet_NaN();
    const bool is_float = tok.find_first_of(".eE") != std::string::npos;
    std::size_t used = 0;
    try {
      if (is_float) {
        const double v = std::stod(tok, &used);
        if (used == tok.size()) return v;
      } else {
        const long long v = std::stoll(tok, &used, 10);
        if (used == tok.size()) return v;
      }
    } catch (const std::exception&) {
    }
    fail("invalid value '" + tok + "'");
  }
};

}  // namespace

nlohmann::json parse_toml(const std::string& text) { return Parser(text).run(); }

}  // namespace perishfair
