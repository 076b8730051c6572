#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qkdrate::cli {

/// Numbers are written with 9 significant digits (printf %.9g), so "nan" and
/// "inf" appear verbatim.
std::string format_number(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  /// Comma-separated, LF line endings, header first.
  void write(std::ostream& out) const;
};

}  // namespace qkdrate::cli
