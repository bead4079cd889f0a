#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>

#include "covpart/errors.hpp"

namespace covpart {

struct CsvData {
  Eigen::MatrixXd rows;
  std::optional<Eigen::VectorXd> weights;
  bool had_header = false;
};

/// Reads a point-per-row CSV. Columns are coordinates; when
/// last_column_weight is set the final column is the point's weight.
/// A header row is auto-detected by a non-numeric first row.
CsvData read_csv(const std::string& path, bool last_column_weight = false);
CsvData read_csv(std::istream& in, bool last_column_weight = false);

/// Writes rows as plain numeric CSV with round-trip-exact formatting.
void write_csv(const std::string& path, const Eigen::MatrixXd& rows);
void write_csv(std::ostream& out, const Eigen::MatrixXd& rows);

}  // namespace covpart
