#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace onlineid::io {

/// Shortest round-trip form is not required; 17 significant digits are.
std::string format_double(double v);

/// Comma-separated writer with a fixed header; every row must match its width.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  void row(std::span<const double> values);
  void row(const std::vector<std::string>& cells);
  void flush() { out_.flush(); }

 private:
  std::ostream& out_;
  std::size_t width_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws InputError when the column is missing.
  std::size_t column(const std::string& name) const;
  /// Throws InputError when the cell is not a number.
  double number(std::size_t row, std::size_t col) const;
};

/// Reads a headered CSV without quoting. Throws InputError on ragged rows
/// or an empty input.
CsvTable read_csv(std::istream& in);

}  // namespace onlineid::io
