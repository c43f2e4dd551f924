#include "output.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "posmom/errors.hpp"

namespace posmom::cli {

namespace {

constexpr const char* kFailureMarker = "# FAILED: ";

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) line += ',';
    line += cells[i];
  }
  return line;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, r.ptr};
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& comments,
                     const std::vector<std::string>& columns)
    : out_(path), columns_(columns.size()) {
  if (!out_) throw ConfigurationError("cannot write " + path.string());
  for (const std::string& c : comments) out_ << "# " << c << '\n';
  out_ << join(columns) << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  row(cells);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw InvalidArgument("CsvWriter: row width does not match the header");
  out_ << join(cells) << '\n';
}

void CsvWriter::failure(const std::string& message) {
  std::string flat = message;
  for (char& ch : flat) {
    if (ch == '\n') ch = ' ';
  }
  out_ << kFailureMarker << flat << '\n';
  out_.flush();
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read " + path.string());
  CsvTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(kFailureMarker, 0) == 0) {
      throw ConfigurationError(path.string() + " is from a failed run: " + line.substr(10));
    }
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (table.columns.empty()) {
      table.columns = std::move(cells);
      continue;
    }
    if (cells.size() != table.columns.size()) throw ConfigurationError(path.string() + ": ragged row");
    std::vector<double> values;
    values.reserve(cells.size());
    for (const std::string& c : cells) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size()) {
        throw ConfigurationError(path.string() + ": non-numeric cell '" + c + "'");
      }
      values.push_back(v);
    }
    table.rows.push_back(std::move(values));
  }
  if (table.columns.empty()) throw ConfigurationError(path.string() + ": no header row");
  return table;
}

void write_manifest(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& entries) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ConfigurationError("cannot write " + tmp.string());
    out << "# posmom run manifest\n";
    for (const auto& [k, v] : entries) out << k << '=' << v << '\n';
    out.flush();
    if (!out) throw ConfigurationError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::map<std::string, std::string> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

}  // namespace posmom::cli
