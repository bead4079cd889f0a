#pragma once

#include <cstdint>
#include <vector>

#include "covpart/partition.hpp"

namespace covpart {

struct PinningConfig {
  int k = 3;
  std::uint64_t seed = 0;
  int max_retries = 16;  // total attempt budget
};

struct PinningResult {
  Partition partition;
  CovarianceReport report;
  int attempts = 0;
  bool accepted = false;
  int t = 0;
  std::vector<int> pinned;  // the conditioned coordinate set S, sorted
  double threshold = 0;     // 9 / sqrt(floor(log2 k))
};

/// Partitions a Boolean distribution (support in {+-1}^m / sqrt(m)) by the
/// sign pattern of a uniformly random coordinate subset: t is drawn from
/// {0,...,floor(log2 k)}, then S from the t-subsets of [m]. An attempt is
/// accepted when the measured loss clears the Markov threshold
/// 9/sqrt(floor(log2 k)); otherwise fresh (t, S) are drawn, up to
/// max_retries attempts, and the best attempt is returned flagged
/// accepted=false. When 2^m <= k the support already fits in k singleton
/// cells and the discrete partition is returned directly.
PinningResult pin_partition(const EmpiricalDistribution& dist,
                            const PinningConfig& cfg);

/// Cells = maximal subsets of the support agreeing on the signs of the
/// pinned coordinates. At most 2^|pinned| nonempty cells.
Partition partition_by_sign_pattern(const EmpiricalDistribution& dist,
                                    const std::vector<int>& pinned,
                                    int k_budget);

struct AuditOptions {
  bool allow_sampling = false;
  int samples = 10000;
  std::uint64_t seed = 0;
};

/// Average over t ~ {0..l} and S ~ ([m] choose t) of
/// E_{X_S} sum_{i != j} Cov(X_i, X_j | X_S)^2 for the unnormalized
/// +-1-valued coordinates, with l = floor(log2 k). Enumerates all (t, S)
/// pairs when sum_t C(m,t) <= 10^6, otherwise Monte-Carlo samples (t, S)
/// if opts.allow_sampling is set.
double pinning_expectation_audit(const EmpiricalDistribution& dist, int k,
                                 const AuditOptions& opts = {});

}  // namespace covpart
