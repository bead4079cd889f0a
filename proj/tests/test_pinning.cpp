#include <doctest.h>

#include <cmath>

#include "covpart/pinning.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using covpart::EmpiricalDistribution;
using covpart::InputError;
using covpart::PinningConfig;

TEST_CASE("small cubes take the discrete shortcut") {
  auto dist = gen::boolean_cube(2);  // 4 points, k = 8 covers them
  auto result = covpart::pin_partition(dist, PinningConfig{8, 123, 16});
  CHECK(result.attempts == 1);
  CHECK(result.accepted);
  CHECK(result.partition.cell_count() == 4);
  CHECK(result.report.loss_frobenius <= 1e-14);
  CHECK(result.t == 2);
}

TEST_CASE("pinning the empty set is the trivial partition") {
  auto dist = gen::boolean_cube(4);
  auto part = covpart::partition_by_sign_pattern(dist, {}, 16);
  CHECK(part.cell_count() == 1);
  const double loss = covpart::covariance_loss(dist, part).loss_frobenius;
  // Sigma_X = I/4 for the uniform cube, so the full loss is sqrt(4)/4
  CHECK(loss == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pinning two coordinates of the uniform 4-cube") {
  auto dist = gen::boolean_cube(4);
  auto part = covpart::partition_by_sign_pattern(dist, {0, 1}, 16);
  CHECK(part.cell_count() == 4);

  const double measured = covpart::covariance_loss(dist, part).loss_frobenius;
  const double reference = oracle::loss(dist, part);
  // frozen: Sigma_X = I/4, Sigma_Y keeps only the pinned block, so the loss
  // is ||diag(0,0,1/4,1/4)||_F = sqrt(2)/4
  CHECK(reference == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-12));
  CHECK(measured == doctest::Approx(reference).epsilon(1e-12));

  // cell means carry the pinned signs and zero out the free coordinates
  auto cond = covpart::conditional_expectation(dist, part);
  for (int l = 0; l < 4; ++l) {
    CHECK(std::abs(cond.cell_means(l, 0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(cond.cell_means(l, 1)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(cond.cell_means(l, 2)) <= 1e-14);
    CHECK(std::abs(cond.cell_means(l, 3)) <= 1e-14);
  }
}

TEST_CASE("conditioning the uniform cube leaves a diagonal free block") {
  auto dist = gen::boolean_cube(6);
  const std::vector<int> pinned{1, 4};
  auto part = covpart::partition_by_sign_pattern(dist, pinned, 64);
  // per cell: conditional covariance diagonal, 1/m on free coordinates
  for (int cell = 0; cell < part.cell_count(); ++cell) {
    std::vector<int> members;
    for (int i = 0; i < dist.size(); ++i)
      if (part.label(i) == cell) members.push_back(i);
    Eigen::MatrixXd pts(members.size(), dist.dim());
    for (size_t i = 0; i < members.size(); ++i)
      pts.row(static_cast<Eigen::Index>(i)) = dist.points().row(members[i]);
    auto cond = EmpiricalDistribution::from_rows(pts);
    const Eigen::MatrixXd cov = oracle::covariance(cond);
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        const bool a_pinned = a == 1 || a == 4;
        const bool b_pinned = b == 1 || b == 4;
        const double expected =
            (a == b && !a_pinned) ? 1.0 / 6.0 : 0.0;
        (void)b_pinned;
        CHECK(std::abs(cov(a, b) - expected) <= 1e-14);
      }
  }
}

TEST_CASE("pin_partition is deterministic and within budget") {
  std::mt19937_64 rng = covpart::make_rng(41);
  auto dist = gen::correlated_boolean(60, 10, 1, rng);
  PinningConfig cfg{16, 7, 16};
  auto a = covpart::pin_partition(dist, cfg);
  auto b = covpart::pin_partition(dist, cfg);
  CHECK(a.partition.labels() == b.partition.labels());
  CHECK(a.attempts == b.attempts);
  CHECK(a.t == b.t);
  CHECK(a.pinned == b.pinned);
  CHECK(a.partition.cell_count() <= (1 << a.t));
  CHECK(a.partition.cell_count() <= cfg.k);
  CHECK(a.threshold == doctest::Approx(9.0 / 2.0).epsilon(1e-15));
}

TEST_CASE("pin_partition validates input") {
  auto dist = gen::boolean_cube(3);
  CHECK_THROWS_AS(covpart::pin_partition(dist, PinningConfig{2, 0, 16}),
                  InputError);
  Eigen::MatrixXd rows(1, 2);
  rows << 0.3, 0.4;
  CHECK_THROWS_AS(
      covpart::pin_partition(EmpiricalDistribution::from_rows(rows),
                             PinningConfig{8, 0, 16}),
      InputError);
}

TEST_CASE("first attempts clear the threshold at the advertised rate") {
  std::mt19937_64 rng = covpart::make_rng(42);
  auto dist = gen::correlated_boolean(120, 8, 2, rng);  // m = 2*log2(k)
  const int k = 16;
  const double threshold = 9.0 / std::sqrt(4.0);
  int accepted = 0;
  const int seeds = 120;
  for (int s = 0; s < seeds; ++s) {
    auto result =
        covpart::pin_partition(dist, PinningConfig{k, 1000 + (std::uint64_t)s, 1});
    if (result.report.loss_frobenius <= threshold) ++accepted;
  }
  const double sigma = std::sqrt((2.0 / 3.0) * (1.0 / 3.0) / seeds);
  CHECK(static_cast<double>(accepted) / seeds >= 2.0 / 3.0 - 3.0 * sigma);
}

TEST_CASE("audit value is zero without coordinate pairs or correlation") {
  Eigen::MatrixXd one(2, 1);
  one << 1, -1;
  CHECK(covpart::pinning_expectation_audit(
            EmpiricalDistribution::from_rows(one), 8) == 0.0);

  auto independent = gen::boolean_cube(4);
  CHECK(covpart::pinning_expectation_audit(independent, 8) <= 1e-12);
}

TEST_CASE("audit of three perfectly correlated coordinates") {
  // X1 = X2 = X3 uniform +-1: only t = 0 contributes, six unit covariances
  const double s = 1.0 / std::sqrt(3.0);
  Eigen::MatrixXd rows(2, 3);
  rows << s, s, s, -s, -s, -s;
  auto dist = EmpiricalDistribution::from_rows(rows);
  const double value = covpart::pinning_expectation_audit(dist, 4);  // l = 2
  CHECK(value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(value <= 8.0 * 9.0 * std::log(2.0) / 2.0 + 1e-9);
}

TEST_CASE("audit bound holds on enumerable Boolean instances") {
  std::mt19937_64 rng = covpart::make_rng(43);
  for (int family = 0; family < 5; ++family) {
    auto dist = gen::correlated_boolean(40, 6, family, rng);
    for (int k : {4, 16, 64}) {
      const int ell = static_cast<int>(std::floor(std::log2(k)));
      const double value = covpart::pinning_expectation_audit(dist, k);
      CHECK(value <= 8.0 * 36.0 * std::log(2.0) / ell + 1e-9);
    }
  }
}

TEST_CASE("audit switches to sampling only when allowed") {
  std::mt19937_64 rng = covpart::make_rng(44);
  auto dist = gen::distinct_boolean(12, 40, rng);
  CHECK_THROWS_AS(covpart::pinning_expectation_audit(dist, 64), InputError);
  covpart::AuditOptions opts;
  opts.allow_sampling = true;
  opts.seed = 5;
  const double value = covpart::pinning_expectation_audit(dist, 64, opts);
  CHECK(value >= 0.0);
  CHECK(value <= 8.0 * 40.0 * 40.0 * std::log(2.0) / 6.0);
}
