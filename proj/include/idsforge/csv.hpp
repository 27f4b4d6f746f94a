#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace idsforge::csv {

struct Record {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

// RFC-4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF or LF.
// Blank lines are skipped. A UTF-8 byte-order mark on the first line is dropped.
std::vector<Record> read_records(std::istream& in);

void write_field(std::ostream& out, std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest text that parses back to exactly the same double.
std::string format_double(double value);

// Full-token parse; nullopt unless the whole token is a finite number.
std::optional<double> parse_double(std::string_view token);

std::string_view trim(std::string_view s);

}  // namespace idsforge::csv
