#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "covpart/errors.hpp"

namespace covpart {

/// Finitely supported law of a random vector X in the unit ball of R^m.
///
/// Immutable after construction: support points are pairwise distinct,
/// weights are strictly positive and sum to 1.
class EmpiricalDistribution {
 public:
  /// Builds a distribution from one point per row. Weights default to
  /// uniform 1/n; duplicate rows are merged with their weights added and
  /// zero-weight rows dropped. Rows with norm above 1 + 1e-9 are rejected,
  /// smaller overshoots are normalized back onto the sphere.
  static EmpiricalDistribution from_rows(
      const Eigen::MatrixXd& rows,
      const std::optional<Eigen::VectorXd>& weights = std::nullopt);

  /// Same as from_rows, but also reports the support slot each input row
  /// was merged into.
  static std::pair<EmpiricalDistribution, std::vector<int>> from_rows_mapped(
      const Eigen::MatrixXd& rows,
      const std::optional<Eigen::VectorXd>& weights = std::nullopt);

  int dim() const { return static_cast<int>(points_.cols()); }
  int size() const { return static_cast<int>(points_.rows()); }

  /// One support point per row, in first-occurrence order.
  const Eigen::MatrixXd& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  Eigen::VectorXd point(int i) const { return points_.row(i); }
  double weight(int i) const { return weights_(i); }

  Eigen::VectorXd mean() const { return points_.transpose() * weights_; }

 private:
  EmpiricalDistribution(Eigen::MatrixXd points, Eigen::VectorXd weights)
      : points_(std::move(points)), weights_(std::move(weights)) {}

  Eigen::MatrixXd points_;
  Eigen::VectorXd weights_;
};

/// Divides all rows by scale = max(1, largest row norm) so the data fits in
/// the unit ball; returns the scale so metrics can be un-scaled downstream.
std::pair<EmpiricalDistribution, double> rescale_to_unit_ball(
    const Eigen::MatrixXd& rows,
    const std::optional<Eigen::VectorXd>& weights = std::nullopt);

/// Rounds every coordinate to the nearest multiple of epsilon and merges the
/// resulting duplicates. Points pushed outside the unit ball are radially
/// projected back. No point moves farther than epsilon * sqrt(m).
EmpiricalDistribution snap_to_grid(const EmpiricalDistribution& dist,
                                   double epsilon);

}  // namespace covpart
