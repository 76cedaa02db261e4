#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace logcap {

/// Empty, flag, integer, real or text.
using Cell = std::variant<std::monostate, bool, long long, double, std::string>;

struct ResultTable {
  std::string id;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  ResultTable() = default;
  ResultTable(std::string id, std::vector<std::string> columns);

  void add_row(std::vector<Cell> row);
  void set_meta(const std::string& key, const std::string& value);
  std::string meta(const std::string& key) const;
  // Index of a column, or throws LookupError.
  std::size_t column(const std::string& name) const;
  // True iff every non-empty cell of a "pass" column is true.
  bool all_pass() const;
};

enum class OutputFormat { Csv, Json, Plot };

OutputFormat parse_format(const std::string& text);
std::string extension(OutputFormat f);

std::string format_double(double x);
std::string to_csv(const ResultTable& t);
std::string to_json_text(const ResultTable& t);
ResultTable table_from_json_text(const std::string& text);
// First column as x; one two-column block per numeric column.
std::string to_plot_data(const ResultTable& t);

/// Writes <dir>/<id>.<ext> and returns the path.
std::filesystem::path emit(const ResultTable& t, OutputFormat f, const std::filesystem::path& dir);

/// 64-bit FNV-1a of a string, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace logcap
