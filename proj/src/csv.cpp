#include "evoarch/csv.hpp"

#include <algorithm>

#include "evoarch/error.hpp"

namespace evoarch {

namespace {

struct RawRecord {
  std::size_t line;
  CsvRow cells;
};

std::vector<RawRecord> read_records(std::string_view text) {
  std::vector<RawRecord> records;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    RawRecord rec{line, {}};
    std::string cell;
    bool done = false;
    while (!done) {
      if (i < text.size() && text[i] == '"') {
        ++i;
        while (true) {
          if (i >= text.size()) throw Error(ErrorCode::kParseError, "unterminated quoted cell", rec.line);
          char c = text[i++];
          if (c == '"') {
            if (i < text.size() && text[i] == '"') {
              cell += '"';
              ++i;
              continue;
            }
            break;
          }
          if (c == '\n') ++line;
          cell += c;
        }
        if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
          throw Error(ErrorCode::kParseError, "unexpected character after closing quote", rec.line);
        }
      } else {
        while (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
          if (text[i] == '"') throw Error(ErrorCode::kParseError, "quote inside unquoted cell", rec.line);
          cell += text[i++];
        }
      }
      rec.cells.push_back(std::move(cell));
      cell.clear();
      if (i >= text.size()) {
        done = true;
      } else if (text[i] == ',') {
        ++i;
      } else {
        if (text[i] == '\r') {
          ++i;
          if (i < text.size() && text[i] != '\n') {
            throw Error(ErrorCode::kParseError, "bare carriage return", rec.line);
          }
        }
        if (i < text.size()) ++i;  // '\n'
        ++line;
        done = true;
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

std::vector<CsvRow> parse_csv(std::string_view text, std::size_t column_count) {
  auto records = read_records(text);
  if (records.empty()) throw Error(ErrorCode::kParseError, "missing header row", 1);
  if (records.front().cells.size() != column_count) {
    throw Error(ErrorCode::kConfigMismatch, "header has " +
                                                std::to_string(records.front().cells.size()) +
                                                " columns, expected " + std::to_string(column_count));
  }
  std::vector<CsvRow> rows;
  rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].cells.size() != column_count) {
      throw Error(ErrorCode::kParseError,
                  "row has " + std::to_string(records[r].cells.size()) + " cells, expected " +
                      std::to_string(column_count),
                  records[r].line);
    }
    rows.push_back(std::move(records[r].cells));
  }
  return rows;
}

std::vector<CsvRow> parse_csv(std::string_view text, std::span<const std::string> expected_header) {
  auto records = read_records(text);
  if (records.empty()) throw Error(ErrorCode::kParseError, "missing header row", 1);
  const auto& header = records.front().cells;
  if (header.size() != expected_header.size() ||
      !std::equal(header.begin(), header.end(), expected_header.begin())) {
    std::string got;
    for (const auto& h : header) got += (got.empty() ? "" : ",") + h;
    throw Error(ErrorCode::kConfigMismatch, "CSV header '" + got + "' does not match config");
  }
  return parse_csv(text, expected_header.size());
}

std::string csv_row(std::span<const std::string> cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    const auto& c = cells[i];
    if (c.find_first_of(",\"\r\n") == std::string::npos) {
      out += c;
      continue;
    }
    out += '"';
    for (char ch : c) {
      if (ch == '"') out += '"';
      out += ch;
    }
    out += '"';
  }
  return out;
}

}  // namespace evoarch
