#include "idsforge/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>

#include "idsforge/error.hpp"

namespace idsforge::csv {

std::vector<Record> read_records(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  if (text.starts_with("\xEF\xBB\xBF")) pos = 3;

  std::vector<Record> records;
  std::size_t line = 1;
  while (pos < text.size()) {
    Record rec;
    rec.line = line;
    std::string field;
    bool quoted_field = false;
    bool end_of_record = false;
    while (!end_of_record) {
      if (pos >= text.size()) {
        rec.fields.push_back(std::move(field));
        break;
      }
      char ch = text[pos];
      if (ch == '"' && field.empty() && !quoted_field) {
        quoted_field = true;
        ++pos;
        const std::size_t start_line = line;
        for (;;) {
          if (pos >= text.size()) {
            throw InputError("unterminated quoted field starting on line " + std::to_string(start_line));
          }
          ch = text[pos++];
          if (ch == '"') {
            if (pos < text.size() && text[pos] == '"') {
              field.push_back('"');
              ++pos;
            } else {
              break;
            }
          } else {
            if (ch == '\n') ++line;
            field.push_back(ch);
          }
        }
        continue;
      }
      ++pos;
      if (ch == ',') {
        rec.fields.push_back(std::move(field));
        field.clear();
        quoted_field = false;
      } else if (ch == '\n' || ch == '\r') {
        if (ch == '\r' && pos < text.size() && text[pos] == '\n') ++pos;
        ++line;
        rec.fields.push_back(std::move(field));
        end_of_record = true;
      } else {
        field.push_back(ch);
      }
    }
    const bool blank = rec.fields.size() == 1 && rec.fields[0].empty() && !quoted_field;
    if (!blank) records.push_back(std::move(rec));
  }
  return records;
}

void write_field(std::ostream& out, std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    out << field;
    return;
  }
  out << '"';
  for (char ch : field) {
    if (ch == '"') out << '"';
    out << ch;
  }
  out << '"';
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    write_field(out, fields[i]);
  }
  out << '\n';
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::optional<double> parse_double(std::string_view token) {
  token = trim(token);
  if (token.empty()) return std::nullopt;
  if (token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace idsforge::csv
