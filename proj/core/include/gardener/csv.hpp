#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gardener {

/// Minimal RFC 4180 reader: comma separated, double-quoted fields may hold
/// commas and doubled quotes. Blank lines are skipped; cells are trimmed.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by case-insensitive name, or -1.
  int column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);

/// Throw ParseError naming `what` on malformed input.
double parse_double(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);

/// Quotes the field when it contains a comma, quote or newline.
std::string csv_field(std::string_view text);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

}  // namespace gardener
