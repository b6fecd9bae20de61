#include "mfns/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace mfns {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header) {
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) {
    throw std::runtime_error("CsvWriter: cannot open " + path.string());
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ',';
    out_ << format_double(values[i]);
  }
  out_ << '\n';
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& f) {
  CsvWriter csv(path, {"x", "value"});
  for (int j = 0; j < f.size(); ++j) {
    const double row[2] = {f.grid().center(j), f[j]};
    csv.row(row);
  }
}

}  // namespace mfns
