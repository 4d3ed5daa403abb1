#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fbreg::cli {

/// Empty cell, number (printed with 17 significant digits), integer or text.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

/// RFC-4180 table preceded by '#' provenance lines:
///   # fbreg-csv v1
///   # config-sha256: <hash>
///   # seed: <seed>
///   # scenario: <name>
/// followed by any extra "# key: value" notes, then the header row.
class CsvTable {
 public:
  CsvTable(std::string hash, std::uint64_t seed, std::string scenario,
           std::vector<std::string> columns);

  void note(std::string key, std::string value);
  void note(std::string key, double value);
  void add_row(std::vector<Cell> row);

  std::size_t rows() const noexcept { return rows_.size(); }
  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::string hash_;
  std::uint64_t seed_;
  std::string scenario_;
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> notes_;
  std::vector<std::vector<Cell>> rows_;
};

/// %.17g
std::string format_number(double v);
/// Quotes a field when it holds a comma, quote, CR or LF.
std::string quote_field(std::string_view field);

}  // namespace fbreg::cli
