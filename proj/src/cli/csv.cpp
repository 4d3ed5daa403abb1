#include "fbreg/cli/csv.hpp"

#include <cstdio>
#include <fstream>

#include "fbreg/error.hpp"

namespace fbreg::cli {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvTable::CsvTable(std::string hash, std::uint64_t seed, std::string scenario,
                   std::vector<std::string> columns)
    : hash_(std::move(hash)),
      seed_(seed),
      scenario_(std::move(scenario)),
      columns_(std::move(columns)) {}

void CsvTable::note(std::string key, std::string value) {
  notes_.emplace_back(std::move(key), std::move(value));
}

void CsvTable::note(std::string key, double value) {
  notes_.emplace_back(std::move(key), format_number(value));
}

void CsvTable::add_row(std::vector<Cell> row) {
  require(row.size() == columns_.size(), Module::Cli, ErrorCode::InvalidArgument,
          "CSV row has " + std::to_string(row.size()) + " cells, header has " +
              std::to_string(columns_.size()));
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  out += "# fbreg-csv v1\r\n";
  out += "# config-sha256: " + hash_ + "\r\n";
  out += "# seed: " + std::to_string(seed_) + "\r\n";
  out += "# scenario: " + scenario_ + "\r\n";
  for (const auto& [k, v] : notes_) out += "# " + k + ": " + v + "\r\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += quote_field(columns_[i]);
  }
  out += "\r\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      const Cell& c = row[i];
      if (const auto* d = std::get_if<double>(&c))
        out += format_number(*d);
      else if (const auto* n = std::get_if<std::int64_t>(&c))
        out += std::to_string(*n);
      else if (const auto* s = std::get_if<std::string>(&c))
        out += quote_field(*s);
    }
    out += "\r\n";
  }
  return out;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), Module::Cli, ErrorCode::Io, "cannot write " + path);
  const std::string text = str();
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  require(static_cast<bool>(f), Module::Cli, ErrorCode::Io, "write failed for " + path);
}

}  // namespace fbreg::cli
