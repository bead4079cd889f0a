#include "covpart/distribution.hpp"

#include <cmath>
#include <map>

namespace covpart {
namespace {

constexpr double kNormRejectTol = 1e-9;
constexpr double kNormKeepTol = 1e-12;  // ball-membership tolerance
constexpr double kWeightSumTol = 1e-12;

}  // namespace

std::pair<EmpiricalDistribution, std::vector<int>>
EmpiricalDistribution::from_rows_mapped(
    const Eigen::MatrixXd& rows, const std::optional<Eigen::VectorXd>& weights) {
  const int n = static_cast<int>(rows.rows());
  const int m = static_cast<int>(rows.cols());
  if (n == 0 || m == 0) throw InputError("from_rows: empty input");
  if (!rows.allFinite()) throw InputError("from_rows: non-finite coordinate");

  Eigen::VectorXd w;
  if (weights) {
    if (weights->size() != n)
      throw InputError("from_rows: weight count does not match row count");
    if ((weights->array() < 0.0).any())
      throw InputError("from_rows: negative weight");
    if (!weights->allFinite()) throw InputError("from_rows: non-finite weight");
    w = *weights;
  } else {
    w = Eigen::VectorXd::Constant(n, 1.0 / n);
  }
  long double total = 0.0L;
  for (int i = 0; i < n; ++i) total += w(i);
  if (!(total > 0.0L)) throw InputError("from_rows: weights sum to zero");

  // Clamp tiny norm overshoots back onto the sphere; reject real violations.
  Eigen::MatrixXd pts = rows;
  for (int i = 0; i < n; ++i) {
    const double nrm = pts.row(i).norm();
    if (nrm > 1.0 + kNormRejectTol)
      throw InputError("from_rows: point norm exceeds 1");
    if (nrm > 1.0 + kNormKeepTol) pts.row(i) /= nrm;
  }

  // Merge duplicates by exact value equality, keeping first-occurrence order.
  std::map<std::vector<double>, int> slot_of;
  std::vector<int> row_to_slot(n, -1);
  std::vector<int> representative;
  std::vector<long double> merged_w;
  std::vector<double> key(m);
  for (int i = 0; i < n; ++i) {
    if (w(i) == 0.0) continue;  // zero-weight points are dropped
    for (int j = 0; j < m; ++j) key[static_cast<size_t>(j)] = pts(i, j);
    auto [it, inserted] =
        slot_of.emplace(key, static_cast<int>(representative.size()));
    if (inserted) {
      representative.push_back(i);
      merged_w.push_back(0.0L);
    }
    row_to_slot[static_cast<size_t>(i)] = it->second;
    merged_w[static_cast<size_t>(it->second)] += w(i);
  }
  // Zero-weight rows still map to their slot when the point survives.
  for (int i = 0; i < n; ++i) {
    if (row_to_slot[static_cast<size_t>(i)] >= 0) continue;
    for (int j = 0; j < m; ++j) key[static_cast<size_t>(j)] = pts(i, j);
    auto it = slot_of.find(key);
    row_to_slot[static_cast<size_t>(i)] = it == slot_of.end() ? -1 : it->second;
  }

  const int s = static_cast<int>(representative.size());
  if (s == 0) throw InputError("from_rows: weights sum to zero");
  Eigen::MatrixXd support(s, m);
  Eigen::VectorXd wv(s);
  for (int i = 0; i < s; ++i) {
    support.row(i) = pts.row(representative[static_cast<size_t>(i)]);
    wv(i) = static_cast<double>(merged_w[static_cast<size_t>(i)]);
  }
  // Divide by the exact sum once; when the sum is already 1 within the
  // invariant tolerance, keep the bits so construction is idempotent.
  const double sum = static_cast<double>(total);
  if (std::abs(sum - 1.0) > kWeightSumTol) wv /= sum;

  return {EmpiricalDistribution(std::move(support), std::move(wv)),
          std::move(row_to_slot)};
}

EmpiricalDistribution EmpiricalDistribution::from_rows(
    const Eigen::MatrixXd& rows, const std::optional<Eigen::VectorXd>& weights) {
  return from_rows_mapped(rows, weights).first;
}

std::pair<EmpiricalDistribution, double> rescale_to_unit_ball(
    const Eigen::MatrixXd& rows, const std::optional<Eigen::VectorXd>& weights) {
  if (rows.rows() == 0 || rows.cols() == 0)
    throw InputError("rescale_to_unit_ball: empty input");
  if (!rows.allFinite())
    throw InputError("rescale_to_unit_ball: non-finite coordinate");
  const double scale = std::max(1.0, rows.rowwise().norm().maxCoeff());
  if (scale == 1.0)
    return {EmpiricalDistribution::from_rows(rows, weights), 1.0};
  return {EmpiricalDistribution::from_rows(rows / scale, weights), scale};
}

EmpiricalDistribution snap_to_grid(const EmpiricalDistribution& dist,
                                   double epsilon) {
  if (!(epsilon > 0.0)) throw InputError("snap_to_grid: epsilon must be > 0");
  Eigen::MatrixXd snapped = dist.points();
  for (int i = 0; i < snapped.rows(); ++i) {
    for (int j = 0; j < snapped.cols(); ++j) {
      double v = epsilon * std::round(snapped(i, j) / epsilon);
      snapped(i, j) = v + 0.0;  // -0.0 -> +0.0
    }
    const double nrm = snapped.row(i).norm();
    if (nrm > 1.0) snapped.row(i) /= nrm;
  }
  return EmpiricalDistribution::from_rows(snapped, dist.weights());
}

}  // namespace covpart
