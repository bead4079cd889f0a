#include "covpart/pinning.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>

#include "covpart/rng.hpp"

namespace covpart {
namespace {

constexpr double kBooleanTol = 1e-12;

int floor_log2(int k) { return std::bit_width(static_cast<unsigned>(k)) - 1; }

void require_boolean(const EmpiricalDistribution& dist) {
  const double a = 1.0 / std::sqrt(static_cast<double>(dist.dim()));
  for (int i = 0; i < dist.size(); ++i)
    for (int j = 0; j < dist.dim(); ++j)
      if (std::abs(std::abs(dist.points()(i, j)) - a) > kBooleanTol)
        throw InputError("pinning: support is not contained in {+-1}^m/sqrt(m)");
}

// Uniform t-subset of {0..m-1} via partial Fisher-Yates, returned sorted.
std::vector<int> sample_subset(int m, int t, std::mt19937_64& rng) {
  std::vector<int> pool(static_cast<size_t>(m));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < t; ++i) {
    std::uniform_int_distribution<int> pick(i, m - 1);
    std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(pick(rng))]);
  }
  std::vector<int> s(pool.begin(), pool.begin() + t);
  std::sort(s.begin(), s.end());
  return s;
}

// Enumerates the next t-subset in lexicographic order; false when exhausted.
bool next_subset(std::vector<int>& s, int m) {
  const int t = static_cast<int>(s.size());
  for (int i = t - 1; i >= 0; --i) {
    if (s[static_cast<size_t>(i)] < m - (t - i)) {
      ++s[static_cast<size_t>(i)];
      for (int j = i + 1; j < t; ++j)
        s[static_cast<size_t>(j)] = s[static_cast<size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

// E_{X_S} sum_{i!=j} Cov(X_i, X_j | X_S)^2 for the +-1-scaled coordinates.
double conditional_cov_sq(const EmpiricalDistribution& dist,
                          const std::vector<int>& pinned) {
  const int m = dist.dim();
  const double root_m = std::sqrt(static_cast<double>(m));
  const Partition part = partition_by_sign_pattern(dist, pinned, dist.size());
  const int c = part.cell_count();

  std::vector<double> mass(static_cast<size_t>(c), 0.0);
  Eigen::MatrixXd first = Eigen::MatrixXd::Zero(c, m);
  std::vector<Eigen::MatrixXd> second(
      static_cast<size_t>(c), Eigen::MatrixXd::Zero(m, m));
  for (int i = 0; i < dist.size(); ++i) {
    const int l = part.label(i);
    const double w = dist.weight(i);
    const Eigen::VectorXd x = root_m * dist.points().row(i).transpose();
    mass[static_cast<size_t>(l)] += w;
    first.row(l) += w * x.transpose();
    second[static_cast<size_t>(l)] += w * x * x.transpose();
  }
  double total = 0;
  for (int l = 0; l < c; ++l) {
    const double q = mass[static_cast<size_t>(l)];
    const Eigen::VectorXd mu = first.row(l).transpose() / q;
    const Eigen::MatrixXd cov =
        second[static_cast<size_t>(l)] / q - mu * mu.transpose();
    double cell = cov.squaredNorm() - cov.diagonal().squaredNorm();
    total += q * cell;
  }
  return total;
}

}  // namespace

Partition partition_by_sign_pattern(const EmpiricalDistribution& dist,
                                    const std::vector<int>& pinned,
                                    int k_budget) {
  std::vector<int> labels(static_cast<size_t>(dist.size()));
  std::map<std::vector<bool>, int> cell_of;
  std::vector<bool> key(pinned.size());
  for (int i = 0; i < dist.size(); ++i) {
    for (size_t j = 0; j < pinned.size(); ++j)
      key[j] = dist.points()(i, pinned[j]) > 0.0;
    auto [it, inserted] = cell_of.emplace(key, static_cast<int>(cell_of.size()));
    labels[static_cast<size_t>(i)] = it->second;
  }
  return Partition(std::move(labels), k_budget);
}

PinningResult pin_partition(const EmpiricalDistribution& dist,
                            const PinningConfig& cfg) {
  if (cfg.k < 3) throw InputError("pinning: k must be >= 3");
  if (cfg.max_retries < 1) throw InputError("pinning: max_retries must be >= 1");
  require_boolean(dist);

  const int m = dist.dim();
  const int ell = floor_log2(cfg.k);
  const double threshold = 9.0 / std::sqrt(static_cast<double>(ell));

  // 2^m <= k: the support fits in k singleton cells. Pinning every
  // coordinate realizes the discrete partition.
  if (m < 31 && (1 << m) <= cfg.k) {
    std::vector<int> all(static_cast<size_t>(m));
    std::iota(all.begin(), all.end(), 0);
    Partition part = Partition::discrete(dist.size(), cfg.k);
    CovarianceReport rep = covariance_loss(dist, part);
    return PinningResult{std::move(part), std::move(rep), 1,    true,
                         m,               std::move(all),  threshold};
  }

  std::optional<PinningResult> best;
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    std::mt19937_64 rng = make_rng(cfg.seed, static_cast<std::uint64_t>(attempt));
    std::uniform_int_distribution<int> draw_t(0, ell);
    const int t = draw_t(rng);
    std::vector<int> s = sample_subset(m, t, rng);

    Partition part = partition_by_sign_pattern(dist, s, cfg.k);
    CovarianceReport rep = covariance_loss(dist, part);
    const double loss = rep.loss_frobenius;
    PinningResult result{std::move(part), std::move(rep), attempt + 1,
                         loss <= threshold, t, std::move(s), threshold};
    if (result.accepted) return result;
    if (!best || loss < best->report.loss_frobenius) best = std::move(result);
  }
  best->attempts = cfg.max_retries;
  return *std::move(best);
}

double pinning_expectation_audit(const EmpiricalDistribution& dist, int k,
                                 const AuditOptions& opts) {
  if (k < 3) throw InputError("pinning audit: k must be >= 3");
  require_boolean(dist);
  const int m = dist.dim();
  const int ell = floor_log2(k);
  if (m == 1) return 0.0;  // no pairs i != j

  // Count the (t, S) pairs to decide between enumeration and sampling.
  double pair_count = 0;
  {
    double binom = 1;  // C(m, 0)
    for (int t = 0; t <= std::min(ell, m); ++t) {
      pair_count += binom;
      binom = binom * (m - t) / (t + 1);
    }
  }
  if (pair_count <= 1e6) {
    double total = 0;
    for (int t = 0; t <= ell; ++t) {
      if (t > m) continue;  // no subsets of that size
      double subset_sum = 0;
      double subsets = 0;
      std::vector<int> s(static_cast<size_t>(t));
      std::iota(s.begin(), s.end(), 0);
      do {
        subset_sum += conditional_cov_sq(dist, s);
        subsets += 1;
      } while (t > 0 && next_subset(s, m));
      total += subset_sum / subsets;
    }
    return total / (ell + 1);
  }

  if (!opts.allow_sampling)
    throw InputError("pinning audit: enumeration budget exceeded; "
                     "enable sampling");
  const int samples = std::max(opts.samples, 10000);
  std::mt19937_64 rng = make_rng(opts.seed);
  std::uniform_int_distribution<int> draw_t(0, ell);
  double total = 0;
  for (int i = 0; i < samples; ++i) {
    const int t = draw_t(rng);
    if (t > m) continue;  // pins everything: conditional covariances vanish
    const std::vector<int> s = sample_subset(m, t, rng);
    total += conditional_cov_sq(dist, s);
  }
  return total / samples;
}

}  // namespace covpart
