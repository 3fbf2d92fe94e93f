#pragma once

// Minimal RFC 4180 CSV: UTF-8, comma delimiter, header row, LF endings.

#include <string>
#include <string_view>
#include <vector>

namespace fabflow::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  friend bool operator==(const Table&, const Table&) = default;
};

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

/// Quotes a field only when it holds a comma, quote or line break.
std::string escape(std::string_view field);

/// Throws Error{invalid_argument} if a row's width differs from the header's.
std::string write(const Table& table);

/// Inverse of write(). Throws Error{parse_error}.
Table read(std::string_view text);

}  // namespace fabflow::csv
