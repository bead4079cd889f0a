#pragma once

#include <map>
#include <vector>

#include "covpart/covariance.hpp"
#include "covpart/distribution.hpp"

namespace covpart {

/// Assignment of support points to at most k_budget cells.
///
/// Labels are stored in canonical form: cells are numbered by first
/// occurrence, 0..cell_count-1 with no gaps.
class Partition {
 public:
  Partition(std::vector<int> labels, int k_budget);

  static Partition discrete(int n, int k_budget);
  static Partition trivial(int n, int k_budget);

  const std::vector<int>& labels() const { return labels_; }
  int label(int i) const { return labels_[static_cast<size_t>(i)]; }
  int size() const { return static_cast<int>(labels_.size()); }
  int cell_count() const { return cell_count_; }
  int k_budget() const { return k_budget_; }

 private:
  std::vector<int> labels_;
  int cell_count_ = 0;
  int k_budget_ = 0;
};

/// Law of Y = E[X | F]: one mean and one mass per nonempty cell.
struct ConditionalDistribution {
  Eigen::MatrixXd cell_means;    // cell_count x m
  Eigen::VectorXd cell_weights;  // cell_count, sums to 1

  int cell_count() const { return static_cast<int>(cell_weights.size()); }
};

ConditionalDistribution conditional_expectation(
    const EmpiricalDistribution& dist, const Partition& part);

struct CovarianceReport {
  CovarianceMatrix sigma_x;
  CovarianceMatrix sigma_y;
  /// ||Sigma_X - Sigma_Y||_F.
  double loss_frobenius = 0;
  /// ||E[XX^T] - E[YY^T]||_F; coincides with loss_frobenius because
  /// E[Y] = E[X], and the redundancy is a built-in self-check.
  double loss_raw_moment = 0;
  std::map<int, double> tensor_losses;
  int cell_count = 0;
  double min_cell_mass = 0;
};

CovarianceReport covariance_loss(const EmpiricalDistribution& dist,
                                 const Partition& part,
                                 const std::vector<int>& tensor_orders = {});

/// Repeatedly merges the smallest cell into the cell with the nearest mean
/// until every cell holds at least min_count points. Requires uniform
/// weights (count semantics); never increases the cell count and never
/// changes the multiset of points.
Partition equalize_min_cell_size(const EmpiricalDistribution& dist,
                                 const Partition& part, int min_count);

struct SyntheticDataset {
  Eigen::MatrixXd rows;  // one output row per support point: its cell mean
  int anonymity_level = 0;
  std::vector<int> source_cells;
};

/// Replaces each point by its cell mean. Requires uniform weights; the
/// dataset mean is preserved and anonymity_level is the smallest cell size.
SyntheticDataset synthetic_data(const EmpiricalDistribution& dist,
                                const Partition& part);

}  // namespace covpart
