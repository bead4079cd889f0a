#include <doctest.h>

#include <cmath>
#include <sstream>

#include "covpart/csv.hpp"
#include "covpart/distribution.hpp"
#include "support/generators.hpp"

using covpart::EmpiricalDistribution;
using covpart::InputError;

namespace {

Eigen::MatrixXd rows2(std::initializer_list<std::initializer_list<double>> rs) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rs.size()),
                      static_cast<Eigen::Index>(rs.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rs) {
    Eigen::Index j = 0;
    for (double v : r) out(i, j++) = v;
    ++i;
  }
  return out;
}

}  // namespace

TEST_CASE("from_rows defaults to uniform weights") {
  auto dist = EmpiricalDistribution::from_rows(rows2({{1, 0}, {-1, 0}}));
  CHECK(dist.dim() == 2);
  CHECK(dist.size() == 2);
  CHECK(dist.weight(0) == 0.5);
  CHECK(dist.weight(1) == 0.5);
}

TEST_CASE("from_rows merges duplicates") {
  auto dist = EmpiricalDistribution::from_rows(rows2({{0.6, 0.8}, {0.6, 0.8}}));
  CHECK(dist.size() == 1);
  CHECK(dist.weight(0) == 1.0);
  CHECK(dist.points()(0, 0) == 0.6);
}

TEST_CASE("from_rows rejects points outside the ball") {
  CHECK_THROWS_AS(EmpiricalDistribution::from_rows(rows2({{2, 0}})), InputError);
  // Overshoots inside the 1e-9 band are normalized back.
  auto dist = EmpiricalDistribution::from_rows(rows2({{1.0 + 1e-10, 0}}));
  CHECK(dist.points().row(0).norm() <= 1.0 + 1e-12);
}

TEST_CASE("from_rows input validation") {
  CHECK_THROWS_AS(EmpiricalDistribution::from_rows(Eigen::MatrixXd(0, 2)),
                  InputError);
  Eigen::VectorXd negw(2);
  negw << 0.5, -0.5;
  CHECK_THROWS_AS(
      EmpiricalDistribution::from_rows(rows2({{1, 0}, {0, 1}}), negw),
      InputError);
  Eigen::VectorXd zerow = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(
      EmpiricalDistribution::from_rows(rows2({{1, 0}, {0, 1}}), zerow),
      InputError);
  Eigen::MatrixXd nan_row = rows2({{0.1, 0.2}});
  nan_row(0, 0) = std::nan("");
  CHECK_THROWS_AS(EmpiricalDistribution::from_rows(nan_row), InputError);
}

TEST_CASE("zero-weight points are dropped") {
  Eigen::VectorXd w(3);
  w << 0.5, 0.0, 0.5;
  auto dist =
      EmpiricalDistribution::from_rows(rows2({{1, 0}, {0, 1}, {-1, 0}}), w);
  CHECK(dist.size() == 2);
  CHECK(dist.weights().sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("construction is idempotent bit for bit") {
  std::mt19937_64 rng = covpart::make_rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    auto dist = gen::ball_distribution(1 + rep % 17, 1 + rep % 5, rng);
    auto again =
        EmpiricalDistribution::from_rows(dist.points(), dist.weights());
    REQUIRE(again.size() == dist.size());
    CHECK(again.points() == dist.points());
    CHECK(again.weights() == dist.weights());
  }
}

TEST_CASE("rescale_to_unit_ball") {
  auto [d1, s1] = covpart::rescale_to_unit_ball(rows2({{3, 4}}));
  CHECK(s1 == 5.0);
  CHECK(d1.points()(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(d1.points()(0, 1) == doctest::Approx(0.8).epsilon(1e-15));

  auto [d2, s2] = covpart::rescale_to_unit_ball(rows2({{0.5, 0}}));
  CHECK(s2 == 1.0);
  CHECK(d2.points()(0, 0) == 0.5);

  auto [d3, s3] = covpart::rescale_to_unit_ball(rows2({{1, 0}, {0, 2}}));
  CHECK(s3 == 2.0);
  CHECK(d3.points()(0, 0) == 0.5);
  CHECK(d3.points()(1, 1) == 1.0);
}

TEST_CASE("snap_to_grid rounds to the nearest multiple") {
  auto dist = EmpiricalDistribution::from_rows(rows2({{0.123, 0.456}}));
  auto snapped = covpart::snap_to_grid(dist, 0.1);
  CHECK(snapped.points()(0, 0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(snapped.points()(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("snap_to_grid merges collapsing points") {
  auto dist =
      EmpiricalDistribution::from_rows(rows2({{0.01, 0}, {-0.01, 0}}));
  auto snapped = covpart::snap_to_grid(dist, 0.1);
  CHECK(snapped.size() == 1);
  CHECK(snapped.points()(0, 0) == 0.0);
  CHECK(snapped.weight(0) == 1.0);
}

TEST_CASE("snap_to_grid projects overshoots back onto the sphere") {
  auto dist = EmpiricalDistribution::from_rows(rows2({{0.6, 0.8}}));
  auto snapped = covpart::snap_to_grid(dist, 0.5);  // rounds to (0.5, 1.0)
  CHECK(snapped.points().row(0).norm() <= 1.0 + 1e-12);
  const Eigen::Vector2d expected =
      Eigen::Vector2d(0.5, 1.0).normalized();
  CHECK((snapped.points().row(0).transpose() - expected).norm() <= 1e-12);
}

TEST_CASE("snap_to_grid rejects epsilon <= 0") {
  auto dist = EmpiricalDistribution::from_rows(rows2({{0.1, 0.1}}));
  CHECK_THROWS_AS(covpart::snap_to_grid(dist, 0.0), InputError);
}

TEST_CASE("snap_to_grid moves nothing farther than eps*sqrt(m)") {
  std::mt19937_64 rng = covpart::make_rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    const int m = 1 + rep % 6;
    auto dist = gen::ball_distribution(30, m, rng);
    const double eps = 0.05 + 0.02 * (rep % 4);
    auto snapped = covpart::snap_to_grid(dist, eps);
    CHECK(snapped.size() <= dist.size());
    CHECK(snapped.weights().sum() == doctest::Approx(1.0).epsilon(1e-12));
    // every snapped point is within eps*sqrt(m) of some source point
    for (int i = 0; i < snapped.size(); ++i) {
      double nearest = 1e300;
      for (int j = 0; j < dist.size(); ++j)
        nearest = std::min(nearest, (snapped.points().row(i) -
                                     dist.points().row(j)).norm());
      CHECK(nearest <= eps * std::sqrt(static_cast<double>(m)) + 1e-12);
    }
  }
}

TEST_CASE("csv reads plain rows and auto-detects headers") {
  std::stringstream in("x,y\n0.1,0.2\n0.3,0.4\n");
  auto data = covpart::read_csv(in);
  CHECK(data.had_header);
  REQUIRE(data.rows.rows() == 2);
  CHECK(data.rows(1, 1) == 0.4);
  CHECK(!data.weights);
}

TEST_CASE("csv weight column") {
  std::stringstream in("0.1,0.2,2\n0.3,0.4,1\n");
  auto data = covpart::read_csv(in, true);
  REQUIRE(data.rows.cols() == 2);
  REQUIRE(data.weights);
  CHECK((*data.weights)(0) == 2.0);
}

TEST_CASE("csv rejects ragged and non-numeric rows") {
  std::stringstream ragged("0.1,0.2\n0.3\n");
  CHECK_THROWS_AS(covpart::read_csv(ragged), InputError);
  std::stringstream bad("0.1,0.2\n0.3,oops\n");
  CHECK_THROWS_AS(covpart::read_csv(bad), InputError);
  std::stringstream empty("\n\n");
  CHECK_THROWS_AS(covpart::read_csv(empty), InputError);
}

TEST_CASE("csv round trip is exact") {
  std::mt19937_64 rng = covpart::make_rng(13);
  const Eigen::MatrixXd rows = gen::ball_rows(7, 3, rng);
  std::stringstream buf;
  covpart::write_csv(buf, rows);
  auto data = covpart::read_csv(buf);
  CHECK(data.rows == rows);
}
