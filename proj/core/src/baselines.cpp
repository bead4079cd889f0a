#include "covpart/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "covpart/general.hpp"
#include "covpart/rng.hpp"

namespace covpart {

Partition kmeans_partition(const EmpiricalDistribution& dist, int k,
                           std::uint64_t seed, int iters) {
  if (k < 1) throw InputError("kmeans: k must be >= 1");
  if (iters < 1) throw InputError("kmeans: iters must be >= 1");
  const int n = dist.size();
  if (k >= n) return Partition::discrete(n, k);

  std::mt19937_64 rng = make_rng(seed);

  // k-means++ seeding on the weighted support.
  Eigen::MatrixXd centers(k, dist.dim());
  {
    std::vector<double> score(dist.weights().data(),
                              dist.weights().data() + n);
    std::discrete_distribution<int> first(score.begin(), score.end());
    centers.row(0) = dist.points().row(first(rng));
    Eigen::VectorXd min_dsq =
        (dist.points().rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
      for (int i = 0; i < n; ++i)
        score[static_cast<size_t>(i)] = dist.weight(i) * min_dsq(i);
      std::discrete_distribution<int> pick(score.begin(), score.end());
      centers.row(c) = dist.points().row(pick(rng));
      min_dsq = min_dsq.cwiseMin(
          (dist.points().rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
  }

  std::vector<int> labels(static_cast<size_t>(n), 0);
  for (int sweep = 0; sweep < iters; ++sweep) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int arg = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d =
            (dist.points().row(i) - centers.row(c)).squaredNorm();
        if (d < best) {
          best = d;
          arg = c;
        }
      }
      if (labels[static_cast<size_t>(i)] != arg) {
        labels[static_cast<size_t>(i)] = arg;
        changed = true;
      }
    }
    if (!changed && sweep > 0) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, dist.dim());
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(k);
    for (int i = 0; i < n; ++i) {
      sums.row(labels[static_cast<size_t>(i)]) +=
          dist.weight(i) * dist.points().row(i);
      mass(labels[static_cast<size_t>(i)]) += dist.weight(i);
    }
    for (int c = 0; c < k; ++c)
      if (mass(c) > 0.0) centers.row(c) = sums.row(c) / mass(c);
  }
  return Partition(std::move(labels), k);
}

Partition epsnet_partition(const EmpiricalDistribution& dist, int k) {
  if (k < 3) throw InputError("epsnet: k must be >= 3");
  const int t = practical_cube_dim(k, dist.dim());
  const PcaReduction red = pca_reduce(dist, t);

  // Coarsest axis grid over [-1,1]^t whose total cell count stays within k.
  const int divisions = std::max(
      1, static_cast<int>(std::floor(
             std::pow(static_cast<double>(k), 1.0 / t) + 1e-9)));
  const double h = 2.0 / divisions;

  std::vector<int> labels(static_cast<size_t>(red.projected.size()));
  std::map<std::vector<int>, int> cell_of;
  std::vector<int> key(static_cast<size_t>(t));
  for (int i = 0; i < red.projected.size(); ++i) {
    for (int j = 0; j < t; ++j) {
      const int idx =
          static_cast<int>(std::floor((red.projected.points()(i, j) + 1.0) / h));
      key[static_cast<size_t>(j)] = std::clamp(idx, 0, divisions - 1);
    }
    auto [it, inserted] = cell_of.emplace(key, static_cast<int>(cell_of.size()));
    labels[static_cast<size_t>(i)] = it->second;
  }
  return red.pull_back(Partition(std::move(labels), k));
}

namespace {

// Number of partitions of n elements into at most k cells.
double count_partitions(int n, int k) {
  // Stirling numbers of the second kind, summed over cell counts <= k.
  std::vector<std::vector<double>> s(
      static_cast<size_t>(n + 1), std::vector<double>(static_cast<size_t>(n + 1), 0.0));
  s[0][0] = 1;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= i; ++j)
      s[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          j * s[static_cast<size_t>(i - 1)][static_cast<size_t>(j)] +
          s[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)];
  double total = 0;
  for (int j = 1; j <= std::min(n, k); ++j)
    total += s[static_cast<size_t>(n)][static_cast<size_t>(j)];
  return total;
}

}  // namespace

BruteForceResult brute_force_optimal(const EmpiricalDistribution& dist, int k) {
  if (k < 1) throw InputError("brute force: k must be >= 1");
  const int n = dist.size();
  if (n > 10) throw InputError("brute force: support larger than 10 points");
  if (count_partitions(n, k) > 1e6)
    throw InputError("brute force: partition enumeration budget exceeded");

  // Restricted-growth strings in lexicographic order; the first partition
  // attaining the minimum is the lexicographically smallest.
  std::vector<int> labels(static_cast<size_t>(n), 0);
  std::optional<BruteForceResult> best;
  auto consider = [&] {
    Partition part(labels, k);
    const double loss = covariance_loss(dist, part).loss_frobenius;
    if (!best || loss < best->loss - 1e-15)
      best = BruteForceResult{std::move(part), loss};
  };
  auto recurse = [&](auto&& self, int i, int used) -> void {
    if (i == n) {
      consider();
      return;
    }
    const int top = std::min(used + 1, k);
    for (int l = 0; l < top; ++l) {
      labels[static_cast<size_t>(i)] = l;
      self(self, i + 1, std::max(used, l + 1));
    }
  };
  recurse(recurse, 0, 0);
  return *std::move(best);
}

}  // namespace covpart
