#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "mfns/grid.hpp"

namespace mfns {

/// Formats with 17 significant digits so CSV round-trips are exact.
std::string format_double(double v);

/// Writes rows of doubles with a fixed header and fixed formatting; output is
/// byte-deterministic for identical inputs.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(std::span<const double> values);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

/// (x_j, value) rows for plotting a single field.
void write_field_csv(const std::filesystem::path& path, const ScalarField& f);

}  // namespace mfns
