#pragma once

// Minimal CSV support: comma separated, no quoting. Identifiers therefore
// must not contain commas or newlines; files are UTF-8 with one record per
// line and a mandatory header row.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "viewfuse/errors.hpp"

namespace viewfuse::csv {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

struct Table {
  std::size_t header_variant = 0;            // index into the accepted headers
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;        // 1-based source line per row
};

// Parses CSV text against one of the accepted header lines. Blank lines are
// skipped; every data row must have exactly as many fields as the header.
inline Table parse_table(const std::string& text, const std::string& source,
                         const std::vector<std::string>& accepted_headers) {
  Table table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::size_t field_count = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      bool matched = false;
      for (std::size_t i = 0; i < accepted_headers.size(); ++i) {
        if (line == accepted_headers[i]) {
          table.header_variant = i;
          field_count = split_fields(line).size();
          matched = true;
          break;
        }
      }
      if (!matched) {
        throw_validation(source + ":" + std::to_string(line_no) +
                         ": expected header '" + accepted_headers.front() +
                         "', got '" + line + "'");
      }
      saw_header = true;
      continue;
    }
    auto fields = split_fields(line);
    if (fields.size() != field_count) {
      throw_validation(source + ":" + std::to_string(line_no) +
                       ": expected " + std::to_string(field_count) +
                       " fields, got " + std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.row_lines.push_back(line_no);
  }
  if (!saw_header) {
    throw_validation(source + ": empty file, expected header '" +
                     accepted_headers.front() + "'");
  }
  return table;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw_io("read failure on '" + path + "'");
  return buffer.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw_io("write failure on '" + path + "'");
}

inline double parse_double(const std::string& field, const std::string& source,
                           std::size_t line) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw_validation(source + ":" + std::to_string(line) +
                     ": malformed number '" + field + "'");
  }
  if (!std::isfinite(value)) {
    throw_validation(source + ":" + std::to_string(line) +
                     ": non-finite weight '" + field + "'");
  }
  return value;
}

inline long parse_long(const std::string& field, const std::string& source,
                       std::size_t line) {
  long value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw_validation(source + ":" + std::to_string(line) +
                     ": malformed integer '" + field + "'");
  }
  return value;
}

// Fixed-point rendering used by report files; locale independent.
inline std::string format_fixed(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
  return buffer;
}

}  // namespace viewfuse::csv
