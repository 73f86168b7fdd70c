#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace kmcl {

inline constexpr const char* kToolVersion = "kmcl 0.1.0";
inline constexpr int kCsvSchemaVersion = 1;

// Minimal CSV writer: RFC-style quoting, '.' decimal separator, 17
// significant digits, "NONE" for absent values.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& header);

  CsvWriter& field(const std::string& s);
  CsvWriter& field(double v);
  CsvWriter& field(std::optional<double> v);
  CsvWriter& field(std::uint64_t v);
  CsvWriter& field(bool v);
  void end_row();

 private:
  void separator();
  std::ofstream os_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

std::string format_double(double v);

}  // namespace kmcl
