#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evoarch {

using CsvRow = std::vector<std::string>;

// RFC-4180 CSV with a mandatory header row. Returns the data rows only; each
// has exactly `column_count` cells. CRLF and LF line endings are accepted.
// Errors: kParseError{line} for a ragged row or bad quoting (line of the
// row's first physical line), kConfigMismatch when the header width differs.
std::vector<CsvRow> parse_csv(std::string_view text, std::size_t column_count);

// As above, additionally requiring the header cells to equal
// `expected_header` in order (kConfigMismatch otherwise).
std::vector<CsvRow> parse_csv(std::string_view text, std::span<const std::string> expected_header);

// Quotes cells containing ',', '"', CR or LF. No line terminator.
std::string csv_row(std::span<const std::string> cells);

}  // namespace evoarch
