#include "covpart/covariance.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace covpart {
namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr int kMaxTensorOrder = 4;
constexpr double kMaxTensorSize = 1e7;

}  // namespace

CovarianceMatrix CovarianceMatrix::from_symmetric(Eigen::MatrixXd a) {
  if (a.rows() != a.cols())
    throw InputError("CovarianceMatrix: matrix is not square");
  if (((a - a.transpose()).array().abs() > kSymmetryTol).any())
    throw InputError("CovarianceMatrix: matrix is not symmetric");
  a = ((a + a.transpose()) / 2.0).eval();
  return CovarianceMatrix{std::move(a)};
}

Eigen::MatrixXd second_moment(const Eigen::MatrixXd& points,
                              const Eigen::VectorXd& weights) {
  Eigen::MatrixXd s = points.transpose() * weights.asDiagonal() * points;
  return ((s + s.transpose()) / 2.0).eval();
}

CovarianceMatrix covariance_of(const Eigen::MatrixXd& points,
                               const Eigen::VectorXd& weights) {
  // Two-pass centered formula: mean first, then centered outer products.
  const Eigen::VectorXd mu = points.transpose() * weights;
  const Eigen::MatrixXd centered = points.rowwise() - mu.transpose();
  Eigen::MatrixXd sigma =
      centered.transpose() * weights.asDiagonal() * centered;
  sigma = ((sigma + sigma.transpose()) / 2.0).eval();
  return CovarianceMatrix{std::move(sigma)};
}

CovarianceMatrix covariance(const EmpiricalDistribution& dist) {
  return covariance_of(dist.points(), dist.weights());
}

double frobenius_distance(const CovarianceMatrix& a,
                          const CovarianceMatrix& b) {
  if (a.dim() != b.dim())
    throw InputError("frobenius_distance: dimension mismatch");
  return (a.entries - b.entries).norm();
}

double min_eigenvalue(const CovarianceMatrix& a) {
  if (!a.entries.allFinite())
    throw InputError("min_eigenvalue: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      a.entries, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

MomentTensor moment_tensor_of(const Eigen::MatrixXd& points,
                              const Eigen::VectorXd& weights, int d) {
  const int m = static_cast<int>(points.cols());
  if (d < 1 || d > kMaxTensorOrder)
    throw InputError("moment_tensor: order must be in 1..4");
  if (std::pow(static_cast<double>(m), d) > kMaxTensorSize)
    throw InputError("moment_tensor: dim^order exceeds the size guard");

  size_t size = 1;
  for (int i = 0; i < d; ++i) size *= static_cast<size_t>(m);
  MomentTensor t{d, m, std::vector<double>(size, 0.0)};

  std::vector<int> idx(static_cast<size_t>(d), 0);
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    const double w = weights(r);
    std::fill(idx.begin(), idx.end(), 0);
    for (size_t flat = 0; flat < size; ++flat) {
      double prod = w;
      for (int a = 0; a < d; ++a) prod *= points(r, idx[static_cast<size_t>(a)]);
      t.entries[flat] += prod;
      // odometer increment, last index fastest
      for (int a = d - 1; a >= 0; --a) {
        if (++idx[static_cast<size_t>(a)] < m) break;
        idx[static_cast<size_t>(a)] = 0;
      }
    }
  }
  return t;
}

MomentTensor moment_tensor(const EmpiricalDistribution& dist, int d) {
  return moment_tensor_of(dist.points(), dist.weights(), d);
}

double MomentTensor::at(const std::vector<int>& index) const {
  size_t flat = 0;
  for (int i : index) flat = flat * static_cast<size_t>(dim) + static_cast<size_t>(i);
  return entries[flat];
}

double frobenius_distance(const MomentTensor& a, const MomentTensor& b) {
  if (a.order != b.order || a.dim != b.dim)
    throw InputError("frobenius_distance: tensor shape mismatch");
  double sum = 0;
  for (size_t i = 0; i < a.entries.size(); ++i) {
    const double d = a.entries[i] - b.entries[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace covpart
