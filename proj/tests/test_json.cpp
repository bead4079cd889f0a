#include <doctest.h>

#include <json.hpp>

#include "covpart/json_io.hpp"
#include "support/generators.hpp"

TEST_CASE("partition json round trip") {
  covpart::Partition part({0, 1, 0, 2}, 5);
  const std::string text = covpart::to_json(part);
  auto back = covpart::partition_from_json(text);
  CHECK(back.labels() == part.labels());
  CHECK(back.k_budget() == 5);

  auto j = nlohmann::json::parse(text);
  CHECK(j.at("k_budget") == 5);
  CHECK(j.at("labels").size() == 4);
}

TEST_CASE("report json carries matrices and both losses") {
  std::mt19937_64 rng = covpart::make_rng(71);
  auto dist = gen::ball_distribution(8, 2, rng);
  auto part = gen::random_partition(8, 3, rng);
  auto report = covpart::covariance_loss(dist, part, {2, 3});
  auto j = nlohmann::json::parse(covpart::to_json(report));
  CHECK(j.at("sigma_x").size() == 2);
  CHECK(j.at("sigma_x")[0].size() == 2);
  CHECK(j.at("loss_frobenius").get<double>() == report.loss_frobenius);
  CHECK(j.at("loss_raw_moment").get<double>() == report.loss_raw_moment);
  CHECK(j.at("tensor_losses").at("3").get<double>() ==
        report.tensor_losses.at(3));
  CHECK(j.at("cell_count").get<int>() == report.cell_count);
}

TEST_CASE("pinning json exposes the drawn subset") {
  auto dist = gen::boolean_cube(5);
  auto result = covpart::pin_partition(dist, covpart::PinningConfig{8, 3, 16});
  auto j = nlohmann::json::parse(covpart::to_json(result));
  CHECK(j.at("t").get<int>() == result.t);
  CHECK(j.at("S").size() == result.pinned.size());
  CHECK(j.at("attempts").get<int>() == result.attempts);
  CHECK(j.at("accepted").get<bool>() == result.accepted);
  CHECK(j.at("threshold").get<double>() == result.threshold);
}

TEST_CASE("diagnostics json lists the stage counts") {
  std::mt19937_64 rng = covpart::make_rng(72);
  auto dist = gen::ball_distribution(60, 3, rng);
  covpart::GeneralConfig cfg{8, 1.0 / 121.0, 1};
  auto result = covpart::build_partition(dist, cfg);
  auto j = nlohmann::json::parse(covpart::to_json(result.diagnostics));
  CHECK(j.at("budget_k").get<int>() == 8);
  CHECK(j.at("clusters_emitted").get<int>() ==
        result.partition.cell_count());
  CHECK(j.contains("heavy"));
  CHECK(j.contains("cubes_case1"));
  CHECK(j.contains("cubes_case2"));
  CHECK(j.contains("pca_tail"));
}
