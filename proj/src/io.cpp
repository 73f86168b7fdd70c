#include "kmcl/io.hpp"

#include <cstdio>
#include <stdexcept>

namespace kmcl {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n") != std::string::npos;
}

std::string quoted(const std::string& s) {
  if (!needs_quoting(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header)
    : os_(path), columns_(header.size()) {
  if (!os_) {
    throw std::runtime_error("CsvWriter: cannot open " + path.string());
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) os_ << ',';
    os_ << quoted(header[i]);
  }
  os_ << '\n';
}

void CsvWriter::separator() {
  if (in_row_ > 0) os_ << ',';
  ++in_row_;
  if (in_row_ > columns_) {
    throw std::logic_error("CsvWriter: row has more fields than the header");
  }
}

CsvWriter& CsvWriter::field(const std::string& s) {
  separator();
  os_ << quoted(s);
  return *this;
}

CsvWriter& CsvWriter::field(double v) {
  separator();
  os_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::field(std::optional<double> v) {
  if (v) return field(*v);
  separator();
  os_ << "NONE";
  return *this;
}

CsvWriter& CsvWriter::field(std::uint64_t v) {
  separator();
  os_ << v;
  return *this;
}

CsvWriter& CsvWriter::field(bool v) {
  separator();
  os_ << (v ? "true" : "false");
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) {
    throw std::logic_error("CsvWriter: row has fewer fields than the header");
  }
  os_ << '\n';
  in_row_ = 0;
}

}  // namespace kmcl
