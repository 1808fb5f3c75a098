#pragma once
#include <initializer_list>
#include <string>
#include <vector>

namespace ealab {

/// Fixed output precision: 17 significant digits, enough to reproduce any
/// double exactly.
std::string format_g17(double v);

/// One plot-ready table: a header row of column names and string cells
/// (numbers pre-formatted with format_g17, exact rationals verbatim).
struct ReportTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Throws std::invalid_argument when the cell count mismatches columns.
  void add_row(std::vector<std::string> cells);

  /// Comma-separated rendering: header line then one line per row; cells
  /// containing separators are quoted.
  std::string to_csv() const;
};

/// Cells for an all-numeric row.
std::vector<std::string> numeric_row(std::initializer_list<double> values);

/// A finished experiment's emission: a text summary plus its tables.
struct ReportBundle {
  std::string summary;
  std::vector<ReportTable> tables;
};

/// Human-readable rendering: summary, then each table as CSV under a
/// `== name ==` heading.
std::string render_report(const ReportBundle& bundle);

/// Write `<stem>-<table name>.csv` per table and `<stem>-summary.txt` into
/// `dir` (created if missing); returns the paths written.
std::vector<std::string> write_report(const ReportBundle& bundle,
                                      const std::string& dir,
                                      const std::string& stem);

/// Output directory precedence: the EAF_OUTPUT_DIR environment variable when
/// set and non-empty, otherwise `configured`, otherwise ".".
std::string resolve_output_dir(const std::string& configured);

}  // namespace ealab
