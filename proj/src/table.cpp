#include "table.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace netgain::cli {

void Table::add_row(std::vector<nlohmann::json> cells) {
  if (cells.size() != columns.size())
    throw std::invalid_argument("Table: row width does not match the column count");
  for (const auto& c : cells)
    if (!c.is_primitive())
      throw std::invalid_argument("Table: cells must be scalars or null");
  rows.push_back(std::move(cells));
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_cell(const nlohmann::json& c) {
  if (c.is_null()) return "";
  if (c.is_boolean()) return c.get<bool>() ? "true" : "false";
  if (c.is_number_float()) return format_number(c.get<double>());
  if (c.is_number()) return c.dump();
  return csv_escape(c.get<std::string>());
}

}  // namespace

std::string to_csv(const Table& t) {
  std::ostringstream out;
  for (std::size_t m = 0; m < t.columns.size(); ++m)
    out << (m ? "," : "") << csv_escape(t.columns[m]);
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t m = 0; m < row.size(); ++m) out << (m ? "," : "") << csv_cell(row[m]);
    out << "\n";
  }
  return out.str();
}

std::string to_json(const Table& t) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t m = 0; m < row.size(); ++m) obj[t.columns[m]] = row[m];
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

std::string render(const Table& t, const std::string& format) {
  if (format == "json") return to_json(t);
  if (format == "csv") return to_csv(t);
  throw std::invalid_argument("render: format must be 'csv' or 'json'");
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

}  // namespace netgain::cli
