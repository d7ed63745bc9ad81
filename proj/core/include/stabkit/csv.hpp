#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace stabkit::csv {

using Row = std::vector<std::string>;

/// Parses RFC-4180 text: quoted fields, doubled quotes, CRLF or LF line ends.
/// A leading UTF-8 byte-order mark is skipped. A trailing newline does not
/// produce an empty record.
std::vector<Row> parse(std::string_view text);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Strict full-field parse; returns false on trailing garbage or empty input.
bool parse_double(std::string_view text, double& value);

}  // namespace stabkit::csv
