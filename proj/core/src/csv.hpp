#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "clid/error.hpp"

namespace clid::detail {

struct CsvRow {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

/// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
/// newlines. Blank lines are skipped, as are lines starting with `comment`
/// when it is nonzero.
inline std::vector<CsvRow> parse_csv(std::string_view text, char comment = '\0') {
  std::vector<CsvRow> rows;
  std::size_t pos = 0;
  std::size_t line = 1;
  while (pos < text.size()) {
    if (text[pos] == '\n' || (text[pos] == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n')) {
      pos += text[pos] == '\r' ? 2 : 1;
      ++line;
      continue;
    }
    if (comment != '\0' && text[pos] == comment) {
      while (pos < text.size() && text[pos] != '\n') ++pos;
      continue;
    }
    CsvRow row;
    row.line = line;
    std::string field;
    bool in_quotes = false;
    bool done = false;
    while (!done) {
      if (pos >= text.size()) {
        if (in_quotes) throw Error(Errc::MalformedTranscript, "unterminated quoted field", row.line);
        row.fields.push_back(std::move(field));
        break;
      }
      const char c = text[pos++];
      if (in_quotes) {
        if (c == '"') {
          if (pos < text.size() && text[pos] == '"') {
            field += '"';
            ++pos;
          } else {
            in_quotes = false;
          }
        } else {
          if (c == '\n') ++line;
          field += c;
        }
        continue;
      }
      switch (c) {
        case '"':
          in_quotes = true;
          break;
        case ',':
          row.fields.push_back(std::move(field));
          field.clear();
          break;
        case '\r':
          break;
        case '\n':
          ++line;
          row.fields.push_back(std::move(field));
          done = true;
          break;
        default:
          field += c;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// Index of `name` in a header row, or -1.
inline long column_index(const std::vector<std::string>& header, std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<long>(i);
  }
  return -1;
}

}  // namespace clid::detail
