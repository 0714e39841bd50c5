#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace gmwb::cli {

// Locale-independent number text.
std::string fixed(double value, int decimals);
std::string significant(double value, int digits);
std::string shortest(double value);  // round-trips exactly

/// Comma-separated rows behind a fixed header. Fields containing commas,
/// quotes or newlines are quoted.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::vector<std::string> header);

  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace gmwb::cli
