#include "covpart/json_io.hpp"

#include <json.hpp>

namespace covpart {
namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& a) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string to_json(const Partition& part) {
  json j;
  j["labels"] = part.labels();
  j["k_budget"] = part.k_budget();
  return j.dump();
}

Partition partition_from_json(const std::string& text) {
  json j = json::parse(text);
  return Partition(j.at("labels").get<std::vector<int>>(),
                   j.at("k_budget").get<int>());
}

std::string to_json(const CovarianceReport& report) {
  json j;
  j["loss_frobenius"] = report.loss_frobenius;
  j["loss_raw_moment"] = report.loss_raw_moment;
  j["sigma_x"] = matrix_to_json(report.sigma_x.entries);
  j["sigma_y"] = matrix_to_json(report.sigma_y.entries);
  j["cell_count"] = report.cell_count;
  j["min_cell_mass"] = report.min_cell_mass;
  if (!report.tensor_losses.empty()) {
    json t;
    for (const auto& [d, loss] : report.tensor_losses)
      t[std::to_string(d)] = loss;
    j["tensor_losses"] = std::move(t);
  }
  return j.dump();
}

std::string to_json(const PinningResult& result) {
  json j;
  j["t"] = result.t;
  j["S"] = result.pinned;
  j["attempts"] = result.attempts;
  j["accepted"] = result.accepted;
  j["threshold"] = result.threshold;
  return j.dump();
}

std::string to_json(const GeneralDiagnostics& diag) {
  json j;
  j["discrete_shortcut"] = diag.discrete_shortcut;
  j["practical_mode"] = diag.practical_mode;
  j["pca_dim"] = diag.pca_dim;
  j["gamma"] = diag.gamma;
  j["pca_tail"] = diag.pca_tail;
  j["heavy"] = diag.heavy;
  j["cubes_case1"] = diag.cubes_case1;
  j["cubes_case2"] = diag.cubes_case2;
  j["clusters_emitted"] = diag.clusters_emitted;
  j["budget_k"] = diag.budget_k;
  j["heavy_threshold"] = diag.heavy_threshold;
  j["case1_threshold"] = diag.case1_threshold;
  j["conditional_weight_bound"] = diag.conditional_weight_bound;
  j["weight_bound_violations"] = diag.weight_bound_violations;
  j["merged_down"] = diag.merged_down;
  if (!diag.cube_audits.empty()) {
    j["cube_audits"] = diag.cube_audits;
    j["cube_audit_bound"] = diag.cube_audit_bound;
  }
  return j.dump();
}

}  // namespace covpart
