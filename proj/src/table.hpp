#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace netgain::cli {

/// Column-named dataset with scalar cells (number, integer, boolean, string,
/// or null for unavailable values). One in-memory form, two serializations.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  explicit Table(std::vector<std::string> cols) : columns(std::move(cols)) {}

  void add_row(std::vector<nlohmann::json> cells);
};

/// CSV with a header row; floating point uses 12 significant digits, null
/// cells are empty, strings are quoted only when they need to be.
std::string to_csv(const Table& t);

/// JSON array of row objects keyed by column name.
std::string to_json(const Table& t);

/// Renders with the chosen format ("csv" or "json").
std::string render(const Table& t, const std::string& format);

/// Writes via a temp file in the same directory plus an atomic rename, so a
/// crash never leaves a half-written dataset behind.
void atomic_write(const std::filesystem::path& path, std::string_view content);

/// %.12g of a double, the one float format used across all CSV output.
std::string format_number(double v);

}  // namespace netgain::cli
