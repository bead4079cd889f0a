#include "covpart/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace covpart {
namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + s.size();
}

}  // namespace

CsvData read_csv(std::istream& in, bool last_column_weight) {
  std::vector<std::vector<double>> parsed;
  std::string line;
  bool first_data_line = true;
  bool had_header = false;
  size_t width = 0;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    std::vector<double> row(fields.size());
    bool ok = true;
    for (size_t i = 0; i < fields.size(); ++i)
      ok = ok && parse_double(fields[i], row[i]);
    if (!ok) {
      if (first_data_line) {  // non-numeric first row: header
        had_header = true;
        first_data_line = false;
        continue;
      }
      throw InputError("csv: non-numeric field at line " +
                       std::to_string(lineno));
    }
    if (parsed.empty()) {
      width = row.size();
    } else if (row.size() != width) {
      throw InputError("csv: inconsistent column count at line " +
                       std::to_string(lineno));
    }
    first_data_line = false;
    parsed.push_back(std::move(row));
  }
  if (parsed.empty()) throw InputError("csv: no data rows");
  if (last_column_weight && width < 2)
    throw InputError("csv: weight column requested but only one column");

  const size_t cols = last_column_weight ? width - 1 : width;
  CsvData data;
  data.had_header = had_header;
  data.rows.resize(static_cast<Eigen::Index>(parsed.size()),
                   static_cast<Eigen::Index>(cols));
  if (last_column_weight)
    data.weights = Eigen::VectorXd(static_cast<Eigen::Index>(parsed.size()));
  for (size_t i = 0; i < parsed.size(); ++i) {
    for (size_t j = 0; j < cols; ++j)
      data.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parsed[i][j];
    if (last_column_weight)
      (*data.weights)(static_cast<Eigen::Index>(i)) = parsed[i][width - 1];
  }
  return data;
}

CsvData read_csv(const std::string& path, bool last_column_weight) {
  std::ifstream in(path);
  if (!in) throw InputError("csv: cannot open " + path);
  return read_csv(in, last_column_weight);
}

void write_csv(std::ostream& out, const Eigen::MatrixXd& rows) {
  char buf[40];
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", rows(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

void write_csv(const std::string& path, const Eigen::MatrixXd& rows) {
  std::ofstream out(path);
  if (!out) throw InputError("csv: cannot open " + path + " for writing");
  write_csv(out, rows);
}

}  // namespace covpart
