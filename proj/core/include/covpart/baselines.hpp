#pragma once

#include <cstdint>

#include "covpart/partition.hpp"

namespace covpart {

/// Weighted Lloyd iterations with k-means++ seeding. Returned for loss
/// comparison; ties in assignment go to the lowest center index.
Partition kmeans_partition(const EmpiricalDistribution& dist, int k,
                           std::uint64_t seed, int iters = 64);

/// Volumetric baseline: PCA-reduce as the general clusterer does, then
/// quantize [-1,1]^t into floor(k^{1/t}) equal slabs per axis. Deterministic.
Partition epsnet_partition(const EmpiricalDistribution& dist, int k);

struct BruteForceResult {
  Partition partition;
  double loss = 0;
};

/// Enumerates every partition of the support into at most k cells and
/// returns one minimizing the covariance loss; ties broken by the
/// lexicographically smallest label vector. Support size <= 10.
BruteForceResult brute_force_optimal(const EmpiricalDistribution& dist, int k);

}  // namespace covpart
