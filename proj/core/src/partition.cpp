#include "covpart/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace covpart {
namespace {

constexpr double kUniformTol = 1e-12;

void require_matching(const EmpiricalDistribution& dist,
                      const Partition& part) {
  if (part.size() != dist.size())
    throw InputError("partition does not cover the support");
}

void require_uniform(const EmpiricalDistribution& dist) {
  const double u = 1.0 / dist.size();
  if (((dist.weights().array() - u).abs() > kUniformTol).any())
    throw InputError("operation requires uniform weights");
}

std::vector<int> cell_sizes(const Partition& part) {
  std::vector<int> sizes(static_cast<size_t>(part.cell_count()), 0);
  for (int l : part.labels()) ++sizes[static_cast<size_t>(l)];
  return sizes;
}

}  // namespace

Partition::Partition(std::vector<int> labels, int k_budget)
    : labels_(std::move(labels)), k_budget_(k_budget) {
  if (labels_.empty()) throw InputError("Partition: empty label vector");
  if (k_budget_ < 1) throw InputError("Partition: k_budget must be >= 1");
  // Canonicalize: number cells by first occurrence, no gaps.
  std::map<int, int> renum;
  for (int& l : labels_) {
    auto [it, inserted] = renum.emplace(l, static_cast<int>(renum.size()));
    l = it->second;
  }
  cell_count_ = static_cast<int>(renum.size());
  if (cell_count_ > k_budget_)
    throw InputError("Partition: more cells than the k budget");
}

Partition Partition::discrete(int n, int k_budget) {
  std::vector<int> labels(static_cast<size_t>(n));
  std::iota(labels.begin(), labels.end(), 0);
  return Partition(std::move(labels), k_budget);
}

Partition Partition::trivial(int n, int k_budget) {
  return Partition(std::vector<int>(static_cast<size_t>(n), 0), k_budget);
}

ConditionalDistribution conditional_expectation(
    const EmpiricalDistribution& dist, const Partition& part) {
  require_matching(dist, part);
  const int c = part.cell_count();
  const int m = dist.dim();
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(c, m);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(c);
  for (int i = 0; i < dist.size(); ++i) {
    const int l = part.label(i);
    sums.row(l) += dist.weight(i) * dist.points().row(i);
    mass(l) += dist.weight(i);
  }
  for (int l = 0; l < c; ++l) sums.row(l) /= mass(l);
  return ConditionalDistribution{std::move(sums), std::move(mass)};
}

CovarianceReport covariance_loss(const EmpiricalDistribution& dist,
                                 const Partition& part,
                                 const std::vector<int>& tensor_orders) {
  const ConditionalDistribution cond = conditional_expectation(dist, part);
  CovarianceReport rep;
  rep.sigma_x = covariance(dist);
  rep.sigma_y = covariance_of(cond.cell_means, cond.cell_weights);
  rep.loss_frobenius = frobenius_distance(rep.sigma_x, rep.sigma_y);
  rep.loss_raw_moment =
      (second_moment(dist.points(), dist.weights()) -
       second_moment(cond.cell_means, cond.cell_weights))
          .norm();
  rep.cell_count = cond.cell_count();
  rep.min_cell_mass = cond.cell_weights.minCoeff();
  for (int d : tensor_orders) {
    rep.tensor_losses[d] = frobenius_distance(
        moment_tensor(dist, d),
        moment_tensor_of(cond.cell_means, cond.cell_weights, d));
  }
  return rep;
}

Partition equalize_min_cell_size(const EmpiricalDistribution& dist,
                                 const Partition& part, int min_count) {
  require_matching(dist, part);
  require_uniform(dist);
  if (min_count < 0) throw InputError("equalize: negative min_count");
  if (min_count > dist.size())
    throw InputError("equalize: min_count exceeds the number of points");
  if (min_count <= 1) return part;  // every nonempty cell has >= 1 point

  std::vector<int> labels = part.labels();
  std::vector<int> sizes = cell_sizes(part);
  const int m = dist.dim();
  const int c0 = part.cell_count();
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(c0, m);
  for (int i = 0; i < dist.size(); ++i)
    sums.row(labels[static_cast<size_t>(i)]) += dist.points().row(i);

  auto live_count = [&] {
    int n = 0;
    for (int s : sizes)
      if (s > 0) ++n;
    return n;
  };

  while (true) {
    // Smallest undersized cell, lowest index on ties.
    int victim = -1;
    for (int l = 0; l < c0; ++l) {
      if (sizes[static_cast<size_t>(l)] == 0) continue;
      if (sizes[static_cast<size_t>(l)] >= min_count) continue;
      if (victim < 0 ||
          sizes[static_cast<size_t>(l)] < sizes[static_cast<size_t>(victim)])
        victim = l;
    }
    if (victim < 0) break;
    if (live_count() == 1)
      throw InputError("equalize: infeasible min_count");

    const Eigen::VectorXd victim_mean =
        sums.row(victim) / sizes[static_cast<size_t>(victim)];
    int target = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int l = 0; l < c0; ++l) {
      if (l == victim || sizes[static_cast<size_t>(l)] == 0) continue;
      const Eigen::VectorXd mean =
          sums.row(l) / sizes[static_cast<size_t>(l)];
      const double d = (mean - victim_mean).norm();
      if (d < best) {
        best = d;
        target = l;
      }
    }
    for (int& l : labels)
      if (l == victim) l = target;
    sums.row(target) += sums.row(victim);
    sizes[static_cast<size_t>(target)] += sizes[static_cast<size_t>(victim)];
    sums.row(victim).setZero();
    sizes[static_cast<size_t>(victim)] = 0;
  }
  return Partition(std::move(labels), part.k_budget());
}

SyntheticDataset synthetic_data(const EmpiricalDistribution& dist,
                                const Partition& part) {
  require_matching(dist, part);
  require_uniform(dist);
  const ConditionalDistribution cond = conditional_expectation(dist, part);
  const std::vector<int> sizes = cell_sizes(part);

  SyntheticDataset out;
  out.rows.resize(dist.size(), dist.dim());
  out.source_cells = part.labels();
  for (int i = 0; i < dist.size(); ++i)
    out.rows.row(i) = cond.cell_means.row(part.label(i));
  out.anonymity_level = *std::min_element(sizes.begin(), sizes.end());
  return out;
}

}  // namespace covpart
