#pragma once

#include <Eigen/Dense>
#include <vector>

#include "covpart/distribution.hpp"

namespace covpart {

/// Symmetric m x m matrix. Symmetry is validated to 1e-12 entrywise and then
/// enforced exactly at construction.
struct CovarianceMatrix {
  Eigen::MatrixXd entries;

  int dim() const { return static_cast<int>(entries.rows()); }
  static CovarianceMatrix from_symmetric(Eigen::MatrixXd a);
};

/// E[(X - EX)(X - EX)^T] via the two-pass centered formula.
CovarianceMatrix covariance(const EmpiricalDistribution& dist);

/// Weighted covariance of arbitrary point rows (shared with conditional
/// laws, whose support is the set of cell means).
CovarianceMatrix covariance_of(const Eigen::MatrixXd& points,
                               const Eigen::VectorXd& weights);

/// Uncentered second moment E[XX^T].
Eigen::MatrixXd second_moment(const Eigen::MatrixXd& points,
                              const Eigen::VectorXd& weights);

double frobenius_distance(const CovarianceMatrix& a, const CovarianceMatrix& b);

/// Smallest eigenvalue, dense symmetric solver.
double min_eigenvalue(const CovarianceMatrix& a);

/// Dense order-d moment tensor, entry (i1,...,id) = E[X(i1)...X(id)],
/// stored row-major.
struct MomentTensor {
  int order = 0;
  int dim = 0;
  std::vector<double> entries;

  double at(const std::vector<int>& index) const;
};

/// 1 <= d <= 4 and dim^d <= 10^7.
MomentTensor moment_tensor(const EmpiricalDistribution& dist, int d);
MomentTensor moment_tensor_of(const Eigen::MatrixXd& points,
                              const Eigen::VectorXd& weights, int d);

double frobenius_distance(const MomentTensor& a, const MomentTensor& b);

}  // namespace covpart
