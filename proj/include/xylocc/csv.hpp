#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace xylocc {

/// Shortest decimal string that parses back to exactly this double
/// ("1", "0.25", "1e-06"). Keeps repeated runs byte-identical.
std::string format_double(double value);

/// Tabular output with leading "# key: value" metadata lines, then the header
/// row, then data rows. Cells holding a separator, quote or newline are quoted.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> columns,
            const std::map<std::string, std::string>& metadata = {});

  void row(const std::vector<std::string>& cells);
  void numeric_row(const std::vector<double>& values);

 private:
  std::ostream& out_;
  std::size_t n_columns_;
};

}  // namespace xylocc
