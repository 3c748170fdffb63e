#include "xylocc/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace xylocc {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

namespace {

std::string escape_cell(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string quoted = "\"";
  for (char c : cell) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> columns,
                     const std::map<std::string, std::string>& metadata)
    : out_(out), n_columns_(columns.size()) {
  if (columns.empty()) throw std::invalid_argument("CsvWriter needs columns");
  for (const auto& [key, value] : metadata)
    out_ << "# " << key << ": " << value << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ << ',';
    out_ << escape_cell(columns[i]);
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != n_columns_)
    throw std::invalid_argument("row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << escape_cell(cells[i]);
  }
  out_ << '\n';
}

void CsvWriter::numeric_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  row(cells);
}

}  // namespace xylocc
