#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace stabkit::config {

// Subset of TOML sufficient for experiment grids: comments, [table] headers
// (dotted names allowed), bare or quoted keys, and values that are integers,
// floats, booleans, basic or literal strings, or arrays of those (which may
// span lines). Inline tables, multi-line strings and dates are rejected.

struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<std::int64_t, double, bool, std::string, Array> data;

  bool is_number() const;
  double as_double() const;
};

/// Flat map from dotted key path ("grid.n") to value.
using Document = std::map<std::string, Value>;

/// Throws ConfigError naming the line and key on malformed input or
/// duplicate keys.
Document parse_toml(std::string_view text);

}  // namespace stabkit::config
