#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace posmom::cli {

/// Shortest decimal string that reads back to the same double.
std::string format_number(double v);

/// CSV file that starts with `#` comment lines followed by a header row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& comments,
            const std::vector<std::string>& columns);

  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);
  /// Marker row for runs that stop on an error.
  void failure(const std::string& message);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
  std::size_t columns_;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  ///< -1 when absent
};

/// Reads a numeric CSV written by CsvWriter. Comment lines are skipped; a
/// failure marker raises ConfigurationError.
CsvTable read_csv(const std::filesystem::path& path);

/// Writes key=value lines to `path` through a temporary file and a rename.
void write_manifest(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& entries);
std::map<std::string, std::string> read_manifest(const std::filesystem::path& path);

}  // namespace posmom::cli
