#include "ealab/reports.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace ealab {

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_cell(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string quoted = "\"";
  for (char c : cell) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string file_slug(const std::string& name) {
  std::string slug;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      slug += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else if (!slug.empty() && slug.back() != '-')
      slug += '-';
  }
  while (!slug.empty() && slug.back() == '-') slug.pop_back();
  return slug.empty() ? "table" : slug;
}

}  // namespace

void ReportTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size())
    throw std::invalid_argument("report table '" + name + "': row has " +
                                std::to_string(cells.size()) + " cells, want " +
                                std::to_string(columns.size()));
  rows.push_back(std::move(cells));
}

std::string ReportTable::to_csv() const {
  std::ostringstream out;
  for (std::size_t c = 0; c < columns.size(); ++c)
    out << (c ? "," : "") << csv_cell(columns[c]);
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "," : "") << csv_cell(row[c]);
    out << '\n';
  }
  return out.str();
}

std::vector<std::string> numeric_row(std::initializer_list<double> values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_g17(v));
  return cells;
}

std::string render_report(const ReportBundle& bundle) {
  std::ostringstream out;
  out << bundle.summary;
  if (!bundle.summary.empty() && bundle.summary.back() != '\n') out << '\n';
  for (const auto& table : bundle.tables) {
    out << "== " << table.name << " ==\n";
    out << table.to_csv();
  }
  return out.str();
}

std::vector<std::string> write_report(const ReportBundle& bundle,
                                      const std::string& dir,
                                      const std::string& stem) {
  namespace fs = std::filesystem;
  const fs::path base = dir.empty() ? fs::path(".") : fs::path(dir);
  std::error_code ec;
  fs::create_directories(base, ec);
  if (ec)
    throw std::runtime_error("report: cannot create directory: " + dir + ": " +
                             ec.message());

  std::vector<std::string> written;
  auto write_file = [&](const fs::path& path, const std::string& text) {
    std::ofstream file(path, std::ios::trunc);
    if (!file)
      throw std::runtime_error("report: cannot open for write: " +
                               path.string());
    file << text;
    file.flush();
    if (!file)
      throw std::runtime_error("report: write failed: " + path.string());
    written.push_back(path.string());
  };

  std::string summary = bundle.summary;
  if (!summary.empty() && summary.back() != '\n') summary += '\n';
  write_file(base / (stem + "-summary.txt"), summary);
  for (const auto& table : bundle.tables)
    write_file(base / (stem + "-" + file_slug(table.name) + ".csv"),
               table.to_csv());
  return written;
}

std::string resolve_output_dir(const std::string& configured) {
  const char* env = std::getenv("EAF_OUTPUT_DIR");
  if (env != nullptr && env[0] != '\0') return env;
  if (!configured.empty()) return configured;
  return ".";
}

}  // namespace ealab
