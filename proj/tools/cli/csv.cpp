#include "cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "gmwb/errors.hpp"

namespace gmwb::cli {

namespace {

std::string chars(double value, std::chars_format format, int precision) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto res = precision < 0 ? std::to_chars(buf, buf + sizeof buf, value)
                                 : std::to_chars(buf, buf + sizeof buf, value, format, precision);
  return std::string(buf, res.ptr);
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string fixed(double value, int decimals) {
  std::string s = chars(value, std::chars_format::fixed, decimals);
  return s == "-0.0" ? "0.0" : s;
}

std::string significant(double value, int digits) {
  return chars(value, std::chars_format::general, digits);
}

std::string shortest(double value) { return chars(value, std::chars_format::general, -1); }

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw ConfigError("output_path", "cannot write '" + path + "'");
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw std::logic_error("csv: column count mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << quote(fields[i]);
  }
  out_ << '\n';
  out_.flush();
}

}  // namespace gmwb::cli
