#include "stabkit/grid_config.hpp"

#include "stabkit/error.hpp"

#include <cctype>
#include <charconv>

namespace stabkit::config {

bool Value::is_number() const {
  return std::holds_alternative<std::int64_t>(data) || std::holds_alternative<double>(data);
}

double Value::as_double() const {
  if (const auto* i = std::get_if<std::int64_t>(&data)) return static_cast<double>(*i);
  return std::get<double>(data);
}

namespace {

class LineParser {
 public:
  LineParser(std::string_view text, int line) : text_(text), line_(line) {}

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool at_end_or_comment() {
    skip_ws();
    return pos_ >= text_.size() || text_[pos_] == '#';
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("line " + std::to_string(line_) + ": " + what);
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string key() {
    skip_ws();
    if (peek() == '"') return basic_string();
    if (peek() == '\'') return literal_string();
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ == start) fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string dotted_key() {
    std::string k = key();
    skip_ws();
    while (peek() == '.') {
      ++pos_;
      k += '.';
      k += key();
      skip_ws();
    }
    return k;
  }

  std::string basic_string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      char c = text_[pos_++];
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("unterminated escape");
        const char e = text_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      }
      out.push_back(c);
    }
    if (pos_ >= text_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  std::string literal_string() {
    const std::size_t start = ++pos_;
    const auto end = text_.find('\'', start);
    if (end == std::string_view::npos) fail("unterminated string");
    pos_ = end + 1;
    return std::string(text_.substr(start, end - start));
  }

  Value value() {
    skip_ws();
    const char c = peek();
    if (c == '"') return Value{basic_string()};
    if (c == '\'') return Value{literal_string()};
    if (c == '[') return Value{array()};
    if (c == '{') fail("inline tables are not supported");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' &&
           text_[pos_] != '#' && text_[pos_] != ' ' && text_[pos_] != '\t')
      ++pos_;
    std::string token(text_.substr(start, pos_ - start));
    if (token.empty()) fail("expected a value");
    if (token == "true") return Value{true};
    if (token == "false") return Value{false};
    std::string digits;
    for (char ch : token)
      if (ch != '_') digits.push_back(ch);
    if (!digits.empty() && digits.front() == '+') digits.erase(0, 1);
    const char* b = digits.data();
    const char* e = b + digits.size();
    if (digits.find_first_of(".eE") == std::string::npos) {
      std::int64_t i = 0;
      auto res = std::from_chars(b, e, i);
      if (res.ec == std::errc() && res.ptr == e) return Value{i};
    } else {
      double d = 0.0;
      auto res = std::from_chars(b, e, d);
      if (res.ec == std::errc() && res.ptr == e) return Value{d};
    }
    fail("cannot parse value '" + token + "'");
  }

  Array array() {
    ++pos_;  // '['
    Array out;
    for (;;) {
      skip_ws();
      if (peek() == ']') {
        ++pos_;
        return out;
      }
      if (pos_ >= text_.size() || peek() == '#') fail("unterminated array");
      out.push_back(value());
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
};

// Drops a trailing comment; returns the bracket depth left open outside strings.
int strip_comment(std::string& line) {
  int depth = 0;
  char quote = '\0';
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == '\\' && quote == '"') {
        ++i;
      } else if (c == quote) {
        quote = '\0';
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      line.resize(i);
      break;
    } else if (c == '[') {
      ++depth;
    } else if (c == ']') {
      --depth;
    }
  }
  return depth;
}

}  // namespace

Document parse_toml(std::string_view text) {
  Document doc;
  std::string table;
  int line_no = 0;
  auto next_line = [&text, &line_no]() {
    const auto nl = text.find('\n');
    std::string line(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  while (!text.empty()) {
    std::string line = next_line();
    const int start_line = line_no;
    int depth = strip_comment(line);
    // an array value may continue over several lines
    if (depth > 0 && line.find('=') != std::string::npos) {
      while (depth > 0 && !text.empty()) {
        std::string more = next_line();
        depth += strip_comment(more);
        line += ' ';
        line += more;
      }
    }

    LineParser lp(line, start_line);
    if (lp.at_end_or_comment()) continue;
    if (lp.peek() == '[') {
      lp.expect('[');
      if (lp.peek() == '[') lp.fail("arrays of tables are not supported");
      table = lp.dotted_key();
      lp.expect(']');
      if (!lp.at_end_or_comment()) lp.fail("unexpected text after table header");
      continue;
    }
    const std::string key = lp.dotted_key();
    lp.expect('=');
    Value v = lp.value();
    if (!lp.at_end_or_comment()) lp.fail("unexpected text after value of '" + key + "'");
    const std::string path = table.empty() ? key : table + "." + key;
    if (!doc.emplace(path, std::move(v)).second) lp.fail("duplicate key '" + path + "'");
  }
  return doc;
}

}  // namespace stabkit::config
