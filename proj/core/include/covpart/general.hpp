#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "covpart/partition.hpp"

namespace covpart {

struct GeneralConfig {
  int k = 3;
  double c = 1.0 / 121.0;  // universal constant, required in (0, 1/120)
  std::uint64_t seed = 0;
  /// Practical mode keeps every structural step but picks usable constants
  /// at finite k: p = min(max(1, floor(log2(k)/2)), 12, m) and
  /// gamma = 1/sqrt(p ln k). Paper mode uses p = clamp(floor(c ln k), 1, m)
  /// and gamma = exp(-ln(k)/(4p))/sqrt(p).
  bool practical_mode = true;
  std::optional<double> heavy_threshold_override;   // default 3/k
  std::optional<double> case1_threshold_override;   // default k^{-1/2}
  bool collect_cube_audits = false;
};

struct GeneralGeometry {
  int p = 1;        // cube dimension (also the PCA target)
  double gamma = 0;  // cube side
};
GeneralGeometry general_geometry(const GeneralConfig& cfg, int m);
int practical_cube_dim(int k, int m);

/// Projection of the support onto the top-t eigenvectors of E[XX^T],
/// expressed in the eigenbasis. Points with equal projections are merged,
/// and the fiber maps let a partition of the projected support pull back to
/// the original one.
struct PcaReduction {
  EmpiricalDistribution projected;
  Eigen::MatrixXd basis;        // m x t, descending eigenvalues
  Eigen::VectorXd eigenvalues;  // all m, descending
  std::vector<int> fiber_of;    // original support index -> projected index
  std::vector<std::vector<int>> fibers;
  double measured_tail = 0;  // ||(I-P) E[XX^T] (I-P)||_F, always <= 1/sqrt(t)

  Partition pull_back(const Partition& projected_partition) const;
};
PcaReduction pca_reduce(const EmpiricalDistribution& dist, int t);

/// Heavy points get their own cluster; light points go through the cube
/// decomposition. Returns (heavy, light) support indices.
std::pair<std::vector<int>, std::vector<int>> split_heavy(
    const EmpiricalDistribution& dist, int k);
std::pair<std::vector<int>, std::vector<int>> split_by_mass(
    const EmpiricalDistribution& dist, double threshold);

/// One axis-aligned grid cube of side gamma, anchored at the origin with
/// half-open boxes: coordinate i lives in [j*gamma, (j+1)*gamma).
struct CubeCell {
  std::vector<long long> grid_index;
  Eigen::VectorXd anchor;  // cube center
  double side = 0;
  std::vector<int> members;  // support indices, ascending
  double mass = 0;
};

/// Assigns each listed member to its grid cube; only nonempty cubes are
/// materialized, ordered by grid index.
std::vector<CubeCell> decompose_cubes(const EmpiricalDistribution& dist,
                                      const std::vector<int>& members,
                                      double gamma);

/// Case I (mass <= k^{-1/2}, one cluster per cube) vs Case II (randomized
/// rounding). Ties go to Case I. Returns indices into `cells`.
std::pair<std::vector<int>, std::vector<int>> classify_cubes(
    const std::vector<CubeCell>& cells, int k,
    std::optional<double> threshold_override = std::nullopt);

/// Per-coordinate probability that x rounds up to anchor + 3*gamma/2.
/// Chosen so the rounded corner has mean exactly x; always in [1/3, 2/3].
Eigen::VectorXd rounding_up_probabilities(const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& anchor,
                                          double gamma);

/// Draws a corner; bit i set means coordinate i rounded up.
std::uint32_t sample_corner(const Eigen::VectorXd& up_probs,
                            std::mt19937_64& rng);

Eigen::VectorXd corner_point(const Eigen::VectorXd& anchor, double gamma,
                             std::uint32_t pattern, int p);

/// Independently rounds every point of the cube-confined conditional
/// distribution to a corner of the inflated cube anchor + {+-3*gamma/2}^p.
/// Points sharing a corner form one cluster; at most 2^p nonempty clusters.
std::vector<std::uint32_t> round_cube(const EmpiricalDistribution& conditional,
                                      const Eigen::VectorXd& anchor,
                                      double gamma, std::mt19937_64& rng);

/// Exact corner masses q_w and corner means z_w of the idealized rounding Z,
/// enumerated over all 2^p corners (p <= 20).
struct IdealizedRounding {
  Eigen::VectorXd q;  // 2^p corner masses, sums to 1, each >= 3^{-p}
  Eigen::MatrixXd z;  // 2^p x p corner means
};
IdealizedRounding idealized_moments(const EmpiricalDistribution& conditional,
                                    const Eigen::VectorXd& anchor,
                                    double gamma);

/// Measures ||Sigma_X - Sigma_Z||_F both as stated and through raw second
/// moments, against the bound 36*gamma^2*sqrt(p).
struct RoundingAudit {
  double loss_centered = 0;
  double loss_raw = 0;
  double bound = 0;
};
RoundingAudit idealized_rounding_audit(const EmpiricalDistribution& conditional,
                                       const Eigen::VectorXd& anchor,
                                       double gamma);

struct GeneralDiagnostics {
  bool discrete_shortcut = false;
  bool practical_mode = true;
  int pca_dim = 0;
  double gamma = 0;
  double pca_tail = 0;
  int heavy = 0;
  int cubes_case1 = 0;
  int cubes_case2 = 0;
  int clusters_emitted = 0;
  int budget_k = 0;
  double heavy_threshold = 0;
  double case1_threshold = 0;
  double conditional_weight_bound = 0;  // k^{-1/3}
  int weight_bound_violations = 0;      // conditional weights above the bound
  int merged_down = 0;  // merge steps taken to honor the k budget
  std::vector<double> cube_audits;  // per Case-II cube loss, when collected
  double cube_audit_bound = 0;      // 36 gamma^2 sqrt(p)
};

struct GeneralResult {
  Partition partition;
  CovarianceReport report;
  GeneralDiagnostics diagnostics;
};

/// Full pipeline: PCA reduction, heavy-point extraction, cube decomposition,
/// Case I collapse / Case II randomized rounding, pull-back through the PCA
/// fibers. The report is measured on the original distribution. Emits at
/// most k nonempty cells; in paper mode an overflow raises BudgetError, in
/// practical mode overflowing cells are merged down deterministically and
/// the step count recorded in the diagnostics.
GeneralResult build_partition(const EmpiricalDistribution& dist,
                              const GeneralConfig& cfg);

}  // namespace covpart
