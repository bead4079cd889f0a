#include "covpart/general.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "covpart/rng.hpp"

namespace covpart {
namespace {

constexpr double kCubeMembershipTol = 1e-12;
constexpr int kCornerEnumGuard = 20;  // 2^p corner enumeration cap

int floor_log2(int k) {
  int ell = 0;
  while ((1LL << (ell + 1)) <= k) ++ell;
  return ell;
}

void validate(const GeneralConfig& cfg) {
  if (cfg.k < 3) throw InputError("general: k must be >= 3");
  if (!(cfg.c > 0.0 && cfg.c < 1.0 / 120.0))
    throw InputError("general: c must lie in (0, 1/120)");
}

// Sign-normalize a column: first coordinate of magnitude above tolerance
// is made positive.
void orient_column(Eigen::MatrixXd& basis, int col) {
  for (int r = 0; r < basis.rows(); ++r) {
    const double v = basis(r, col);
    if (std::abs(v) > 1e-12) {
      if (v < 0) basis.col(col) = -basis.col(col);
      return;
    }
  }
}

bool lex_greater(const Eigen::MatrixXd& basis, int a, int b) {
  for (int r = 0; r < basis.rows(); ++r) {
    if (basis(r, a) != basis(r, b)) return basis(r, a) > basis(r, b);
  }
  return false;
}

}  // namespace

int practical_cube_dim(int k, int m) {
  const int p = std::max(1, floor_log2(k) / 2);
  return std::min({p, 12, m});
}

GeneralGeometry general_geometry(const GeneralConfig& cfg, int m) {
  validate(cfg);
  const double logk = std::log(static_cast<double>(cfg.k));
  if (cfg.practical_mode) {
    const int p = practical_cube_dim(cfg.k, m);
    return GeneralGeometry{p, 1.0 / std::sqrt(p * logk)};
  }
  const int p =
      std::clamp(static_cast<int>(std::floor(cfg.c * logk)), 1, std::max(1, m));
  return GeneralGeometry{p, std::exp(-logk / (4.0 * p)) / std::sqrt(p)};
}

PcaReduction pca_reduce(const EmpiricalDistribution& dist, int t) {
  const int m = dist.dim();
  if (t < 1 || t > m) throw InputError("pca_reduce: t out of range");

  const Eigen::MatrixXd s = second_moment(dist.points(), dist.weights());
  if (!s.allFinite()) throw InputError("pca_reduce: non-finite moments");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success)
    throw InputError("pca_reduce: eigendecomposition failed");

  // Descending eigenvalues; equal eigenvalues ordered by lexicographically
  // largest eigenvector after sign normalization.
  Eigen::MatrixXd vecs = solver.eigenvectors();
  Eigen::VectorXd vals = solver.eigenvalues();
  std::vector<int> order(static_cast<size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  for (int j = 0; j < m; ++j) orient_column(vecs, j);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (vals(a) != vals(b)) return vals(a) > vals(b);
    return lex_greater(vecs, a, b);
  });

  Eigen::MatrixXd basis(m, t);
  Eigen::VectorXd sorted_vals(m);
  for (int j = 0; j < m; ++j)
    sorted_vals(j) = vals(order[static_cast<size_t>(j)]);
  for (int j = 0; j < t; ++j)
    basis.col(j) = vecs.col(order[static_cast<size_t>(j)]);

  // ||(I-P) E[XX^T] (I-P)||_F = sqrt(sum of squared trailing eigenvalues).
  double tail_sq = 0;
  for (int j = t; j < m; ++j) tail_sq += sorted_vals(j) * sorted_vals(j);

  const Eigen::MatrixXd projected_rows = dist.points() * basis;
  auto [proj, row_to_slot] =
      EmpiricalDistribution::from_rows_mapped(projected_rows, dist.weights());
  std::vector<std::vector<int>> fibers(static_cast<size_t>(proj.size()));
  for (int i = 0; i < dist.size(); ++i)
    fibers[static_cast<size_t>(row_to_slot[static_cast<size_t>(i)])].push_back(i);

  return PcaReduction{std::move(proj),        std::move(basis),
                      std::move(sorted_vals), std::move(row_to_slot),
                      std::move(fibers),      std::sqrt(tail_sq)};
}

Partition PcaReduction::pull_back(const Partition& projected_partition) const {
  std::vector<int> labels(fiber_of.size());
  for (size_t i = 0; i < fiber_of.size(); ++i)
    labels[i] = projected_partition.label(fiber_of[i]);
  return Partition(std::move(labels), projected_partition.k_budget());
}

std::pair<std::vector<int>, std::vector<int>> split_by_mass(
    const EmpiricalDistribution& dist, double threshold) {
  std::vector<int> heavy, light;
  for (int i = 0; i < dist.size(); ++i)
    (dist.weight(i) >= threshold ? heavy : light).push_back(i);
  return {std::move(heavy), std::move(light)};
}

std::pair<std::vector<int>, std::vector<int>> split_heavy(
    const EmpiricalDistribution& dist, int k) {
  if (k < 3) throw InputError("split_heavy: k must be >= 3");
  return split_by_mass(dist, 3.0 / k);
}

std::vector<CubeCell> decompose_cubes(const EmpiricalDistribution& dist,
                                      const std::vector<int>& members,
                                      double gamma) {
  if (!(gamma > 0.0)) throw InputError("decompose_cubes: gamma must be > 0");
  const int p = dist.dim();
  std::map<std::vector<long long>, CubeCell> cubes;
  std::vector<long long> key(static_cast<size_t>(p));
  for (int i : members) {
    for (int j = 0; j < p; ++j)
      key[static_cast<size_t>(j)] =
          static_cast<long long>(std::floor(dist.points()(i, j) / gamma));
    auto [it, inserted] = cubes.emplace(key, CubeCell{});
    CubeCell& cell = it->second;
    if (inserted) {
      cell.grid_index = key;
      cell.side = gamma;
      cell.anchor.resize(p);
      for (int j = 0; j < p; ++j)
        cell.anchor(j) = (key[static_cast<size_t>(j)] + 0.5) * gamma;
    }
    cell.members.push_back(i);
    cell.mass += dist.weight(i);
  }
  std::vector<CubeCell> out;
  out.reserve(cubes.size());
  for (auto& [idx, cell] : cubes) out.push_back(std::move(cell));
  return out;
}

std::pair<std::vector<int>, std::vector<int>> classify_cubes(
    const std::vector<CubeCell>& cells, int k,
    std::optional<double> threshold_override) {
  const double threshold =
      threshold_override.value_or(1.0 / std::sqrt(static_cast<double>(k)));
  std::vector<int> case1, case2;
  for (size_t i = 0; i < cells.size(); ++i)
    (cells[i].mass <= threshold ? case1 : case2).push_back(static_cast<int>(i));
  return {std::move(case1), std::move(case2)};
}

Eigen::VectorXd rounding_up_probabilities(const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& anchor,
                                          double gamma) {
  if (x.size() != anchor.size())
    throw InputError("rounding: dimension mismatch");
  Eigen::VectorXd probs(x.size());
  for (int i = 0; i < x.size(); ++i) {
    const double off = x(i) - anchor(i);
    if (std::abs(off) > gamma / 2.0 + kCubeMembershipTol)
      throw InputError("rounding: point outside its cube");
    // E[(w_x)_i] = x_i forces this two-point distribution on
    // anchor +- 3*gamma/2.
    probs(i) = std::clamp((off + 1.5 * gamma) / (3.0 * gamma), 1.0 / 3.0,
                          2.0 / 3.0);
  }
  return probs;
}

std::uint32_t sample_corner(const Eigen::VectorXd& up_probs,
                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uint32_t pattern = 0;
  for (int i = 0; i < up_probs.size(); ++i)
    if (unit(rng) < up_probs(i)) pattern |= (1u << i);
  return pattern;
}

Eigen::VectorXd corner_point(const Eigen::VectorXd& anchor, double gamma,
                             std::uint32_t pattern, int p) {
  Eigen::VectorXd w(p);
  for (int i = 0; i < p; ++i)
    w(i) = anchor(i) + ((pattern >> i) & 1u ? 1.5 : -1.5) * gamma;
  return w;
}

std::vector<std::uint32_t> round_cube(const EmpiricalDistribution& conditional,
                                      const Eigen::VectorXd& anchor,
                                      double gamma, std::mt19937_64& rng) {
  std::vector<std::uint32_t> corners(static_cast<size_t>(conditional.size()));
  for (int i = 0; i < conditional.size(); ++i) {
    const Eigen::VectorXd probs = rounding_up_probabilities(
        conditional.points().row(i), anchor, gamma);
    corners[static_cast<size_t>(i)] = sample_corner(probs, rng);
  }
  return corners;
}

IdealizedRounding idealized_moments(const EmpiricalDistribution& conditional,
                                    const Eigen::VectorXd& anchor,
                                    double gamma) {
  const int p = conditional.dim();
  if (p > kCornerEnumGuard)
    throw InputError("idealized_moments: 2^p corner enumeration guard");
  const std::uint32_t corners = 1u << p;

  IdealizedRounding ideal;
  ideal.q = Eigen::VectorXd::Zero(corners);
  Eigen::MatrixXd weighted_sum = Eigen::MatrixXd::Zero(corners, p);
  for (int i = 0; i < conditional.size(); ++i) {
    const Eigen::VectorXd probs = rounding_up_probabilities(
        conditional.points().row(i), anchor, gamma);
    const double w = conditional.weight(i);
    for (std::uint32_t pat = 0; pat < corners; ++pat) {
      double prob = 1.0;
      for (int j = 0; j < p; ++j)
        prob *= ((pat >> j) & 1u) ? probs(j) : 1.0 - probs(j);
      ideal.q(pat) += w * prob;
      weighted_sum.row(pat) += w * prob * conditional.points().row(i);
    }
  }
  ideal.z = Eigen::MatrixXd::Zero(corners, p);
  for (std::uint32_t pat = 0; pat < corners; ++pat)
    if (ideal.q(pat) > 0.0) ideal.z.row(pat) = weighted_sum.row(pat) / ideal.q(pat);
  return ideal;
}

RoundingAudit idealized_rounding_audit(const EmpiricalDistribution& conditional,
                                       const Eigen::VectorXd& anchor,
                                       double gamma) {
  const int p = conditional.dim();
  const IdealizedRounding ideal = idealized_moments(conditional, anchor, gamma);
  RoundingAudit audit;
  audit.bound = 36.0 * gamma * gamma * std::sqrt(static_cast<double>(p));
  const CovarianceMatrix sigma_x = covariance(conditional);
  const CovarianceMatrix sigma_z = covariance_of(ideal.z, ideal.q);
  audit.loss_centered = frobenius_distance(sigma_x, sigma_z);
  audit.loss_raw =
      (second_moment(conditional.points(), conditional.weights()) -
       second_moment(ideal.z, ideal.q))
          .norm();
  return audit;
}

namespace {

// Deterministic fallback for practical mode: repeatedly merge the
// lowest-mass cell into the cell with the nearest mean until the budget
// holds. Returns the number of merge steps.
int merge_down_to_budget(std::vector<int>& labels,
                         const EmpiricalDistribution& dist, int budget) {
  int cell_count = 0;
  for (int l : labels) cell_count = std::max(cell_count, l + 1);

  const int m = dist.dim();
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(cell_count, m);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(cell_count);
  for (size_t i = 0; i < labels.size(); ++i) {
    sums.row(labels[i]) += dist.weight(static_cast<int>(i)) *
                           dist.points().row(static_cast<int>(i));
    mass(labels[i]) += dist.weight(static_cast<int>(i));
  }

  std::vector<bool> retired(static_cast<size_t>(cell_count), false);
  int live = cell_count;
  int steps = 0;
  while (live > budget) {
    int victim = -1;
    for (int l = 0; l < cell_count; ++l) {
      if (retired[static_cast<size_t>(l)]) continue;
      if (victim < 0 || mass(l) < mass(victim)) victim = l;
    }
    const Eigen::VectorXd victim_mean = sums.row(victim) / mass(victim);
    int target = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int l = 0; l < cell_count; ++l) {
      if (l == victim || retired[static_cast<size_t>(l)]) continue;
      const double d = (sums.row(l) / mass(l) - victim_mean.transpose()).norm();
      if (d < best) {
        best = d;
        target = l;
      }
    }
    for (int& l : labels)
      if (l == victim) l = target;
    sums.row(target) += sums.row(victim);
    mass(target) += mass(victim);
    sums.row(victim).setZero();
    retired[static_cast<size_t>(victim)] = true;
    --live;
    ++steps;
  }
  return steps;
}

}  // namespace

GeneralResult build_partition(const EmpiricalDistribution& dist,
                              const GeneralConfig& cfg) {
  validate(cfg);
  const int k = cfg.k;
  const int n = dist.size();

  GeneralDiagnostics diag;
  diag.practical_mode = cfg.practical_mode;
  diag.budget_k = k;

  // Enough budget for singletons: loss 0 without any machinery.
  if (n <= k) {
    diag.discrete_shortcut = true;
    diag.clusters_emitted = n;
    Partition part = Partition::discrete(n, k);
    CovarianceReport rep = covariance_loss(dist, part);
    return GeneralResult{std::move(part), std::move(rep), std::move(diag)};
  }

  const GeneralGeometry geo = general_geometry(cfg, dist.dim());
  diag.pca_dim = geo.p;
  diag.gamma = geo.gamma;
  diag.heavy_threshold = cfg.heavy_threshold_override.value_or(3.0 / k);
  diag.case1_threshold =
      cfg.case1_threshold_override.value_or(1.0 / std::sqrt(double(k)));
  diag.conditional_weight_bound = std::pow(static_cast<double>(k), -1.0 / 3.0);
  diag.cube_audit_bound =
      36.0 * geo.gamma * geo.gamma * std::sqrt(static_cast<double>(geo.p));

  const PcaReduction red = pca_reduce(dist, geo.p);
  diag.pca_tail = red.measured_tail;
  const EmpiricalDistribution& proj = red.projected;

  auto [heavy, light] = split_by_mass(proj, diag.heavy_threshold);
  diag.heavy = static_cast<int>(heavy.size());

  std::vector<CubeCell> cubes = decompose_cubes(proj, light, geo.gamma);
  auto [case1, case2] = classify_cubes(cubes, k, diag.case1_threshold);
  diag.cubes_case1 = static_cast<int>(case1.size());
  diag.cubes_case2 = static_cast<int>(case2.size());

  std::vector<int> labels(static_cast<size_t>(proj.size()), -1);
  int next = 0;
  for (int h : heavy) labels[static_cast<size_t>(h)] = next++;
  for (int ci : case1) {
    for (int i : cubes[static_cast<size_t>(ci)].members)
      labels[static_cast<size_t>(i)] = next;
    ++next;
  }
  for (size_t rank = 0; rank < case2.size(); ++rank) {
    const CubeCell& cell = cubes[static_cast<size_t>(case2[rank])];
    // Conditional law within the cube, renormalized.
    Eigen::MatrixXd pts(cell.members.size(), proj.dim());
    Eigen::VectorXd wts(cell.members.size());
    for (size_t i = 0; i < cell.members.size(); ++i) {
      pts.row(static_cast<Eigen::Index>(i)) = proj.points().row(cell.members[i]);
      wts(static_cast<Eigen::Index>(i)) = proj.weight(cell.members[i]);
    }
    wts /= cell.mass;
    const EmpiricalDistribution conditional =
        EmpiricalDistribution::from_rows(pts, wts);
    for (int i = 0; i < conditional.size(); ++i)
      if (conditional.weight(i) > diag.conditional_weight_bound)
        ++diag.weight_bound_violations;

    std::mt19937_64 rng =
        make_rng(cfg.seed, static_cast<std::uint64_t>(case2[rank]));
    const std::vector<std::uint32_t> corners =
        round_cube(conditional, cell.anchor, geo.gamma, rng);
    std::map<std::uint32_t, int> cluster_of;
    for (size_t i = 0; i < cell.members.size(); ++i) {
      auto [it, inserted] = cluster_of.emplace(corners[i], 0);
      if (inserted) it->second = next++;
      labels[static_cast<size_t>(cell.members[i])] = it->second;
    }

    if (cfg.collect_cube_audits && geo.p <= 12) {
      diag.cube_audits.push_back(
          idealized_rounding_audit(conditional, cell.anchor, geo.gamma)
              .loss_centered);
    }
  }

  diag.clusters_emitted = next;
  if (next > k) {
    if (!cfg.practical_mode)
      throw BudgetError("general: cluster budget exceeded (" +
                        std::to_string(next) + " > " + std::to_string(k) + ")");
    diag.merged_down = merge_down_to_budget(labels, proj, k);
  }

  Partition proj_part(std::move(labels), k);
  diag.clusters_emitted = proj_part.cell_count();
  Partition part = red.pull_back(proj_part);
  CovarianceReport rep = covariance_loss(dist, part);
  return GeneralResult{std::move(part), std::move(rep), std::move(diag)};
}

}  // namespace covpart
