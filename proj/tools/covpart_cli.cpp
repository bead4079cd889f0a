// covpart: partition a unit-ball empirical distribution into at most k cells
// so the conditional expectation preserves as much covariance as possible,
// and derive anonymous synthetic data from the partition.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "covpart/baselines.hpp"
#include "covpart/csv.hpp"
#include "covpart/distribution.hpp"
#include "covpart/general.hpp"
#include "covpart/json_io.hpp"
#include "covpart/partition.hpp"
#include "covpart/pinning.hpp"

namespace {

using covpart::EmpiricalDistribution;
using nlohmann::json;

struct RunFlags {
  std::string input;
  std::string algo = "general";
  int k = 8;
  std::uint64_t seed = 0;
  double c = 1.0 / 121.0;
  bool paper_mode = false;
  bool audit = false;
  bool weights = false;
  int retries = 16;
  int iters = 64;
  std::string snap_eps;  // empty, "auto", or a number
  std::vector<int> tensor_orders;
  bool no_meta = false;
  std::string out;
};

void add_common(CLI::App* cmd, RunFlags& flags, bool with_algo = true) {
  cmd->add_option("--input", flags.input, "input CSV, one point per row")
      ->required();
  cmd->add_option("--k", flags.k, "cell budget k (>= 3)")->required();
  if (with_algo)
    cmd->add_option("--algo", flags.algo, "partitioning algorithm")
        ->check(CLI::IsMember({"pinning", "general", "kmeans", "epsnet"}));
  cmd->add_option("--seed", flags.seed, "random seed");
  cmd->add_option("--c", flags.c, "general clusterer constant c");
  cmd->add_flag("--paper-mode", flags.paper_mode,
                "use the literal constants instead of practical mode");
  cmd->add_flag("--audit", flags.audit, "collect per-cube rounding audits");
  cmd->add_flag("--weights", flags.weights,
                "treat the last CSV column as point weights");
  cmd->add_option("--retries", flags.retries, "pinning attempt budget");
  cmd->add_option("--iters", flags.iters, "kmeans sweep budget");
  cmd->add_option("--snap-eps", flags.snap_eps,
                  "snap support to a grid first ('auto' = gamma/8)");
  cmd->add_option("--tensor-orders", flags.tensor_orders,
                  "extra moment-tensor losses to report")
      ->delimiter(',');
  cmd->add_flag("--no-meta", flags.no_meta, "omit the timestamp block");
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

void emit(const json& doc, const std::string& out) {
  if (out.empty()) {
    std::cout << doc.dump() << "\n";
    return;
  }
  std::ofstream file(out);
  if (!file) throw covpart::InputError("cannot open " + out + " for writing");
  file << doc.dump() << "\n";
}

EmpiricalDistribution load_distribution(const RunFlags& flags) {
  auto data = covpart::read_csv(flags.input, flags.weights);
  auto dist = EmpiricalDistribution::from_rows(data.rows, data.weights);
  if (flags.snap_eps.empty()) return dist;
  double eps = 0;
  if (flags.snap_eps == "auto") {
    covpart::GeneralConfig cfg;
    cfg.k = flags.k;
    cfg.c = flags.c;
    cfg.practical_mode = !flags.paper_mode;
    eps = covpart::general_geometry(cfg, dist.dim()).gamma / 8.0;
  } else {
    eps = std::stod(flags.snap_eps);
  }
  return covpart::snap_to_grid(dist, eps);
}

struct RunOutput {
  covpart::Partition partition;
  json report_fields;  // merged into the "report" object
  json diagnostics;    // emitted as a sibling "general" block
};

RunOutput run_algorithm(const EmpiricalDistribution& dist,
                        const RunFlags& flags) {
  if (flags.algo == "pinning") {
    covpart::PinningConfig cfg{flags.k, flags.seed, flags.retries};
    auto result = covpart::pin_partition(dist, cfg);
    return RunOutput{std::move(result.partition),
                     json::parse(covpart::to_json(result)), json()};
  }
  if (flags.algo == "general") {
    covpart::GeneralConfig cfg;
    cfg.k = flags.k;
    cfg.c = flags.c;
    cfg.seed = flags.seed;
    cfg.practical_mode = !flags.paper_mode;
    cfg.collect_cube_audits = flags.audit;
    auto result = covpart::build_partition(dist, cfg);
    return RunOutput{std::move(result.partition), json::object(),
                     json::parse(covpart::to_json(result.diagnostics))};
  }
  if (flags.algo == "kmeans") {
    return RunOutput{
        covpart::kmeans_partition(dist, flags.k, flags.seed, flags.iters),
        json::object(), json()};
  }
  return RunOutput{covpart::epsnet_partition(dist, flags.k), json::object(),
                   json()};
}

json report_json(const covpart::CovarianceReport& report,
                 const RunOutput& run) {
  json j = json::parse(covpart::to_json(report));
  if (run.report_fields.is_object()) j.update(run.report_fields);
  return j;
}

json base_document(const RunFlags& flags) {
  json doc;
  doc["schema"] = 1;
  doc["input"] = flags.input;
  doc["algo"] = flags.algo;
  doc["k"] = flags.k;
  doc["seed"] = flags.seed;
  if (!flags.no_meta) doc["meta"] = {{"generated_at", timestamp()}};
  return doc;
}

int cmd_partition(const RunFlags& flags) {
  const auto dist = load_distribution(flags);
  auto run = run_algorithm(dist, flags);
  const auto report =
      covpart::covariance_loss(dist, run.partition, flags.tensor_orders);

  json doc = base_document(flags);
  doc["partition"] = json::parse(covpart::to_json(run.partition));
  doc["report"] = report_json(report, run);
  if (!run.diagnostics.is_null()) doc["general"] = run.diagnostics;
  emit(doc, flags.out);
  return 0;
}

int cmd_synthesize(const RunFlags& flags, const std::string& min_cell,
                   const std::string& synth_out) {
  if (flags.k < 1) throw covpart::InputError("synthesize: k must be >= 1");
  auto data = covpart::read_csv(flags.input, flags.weights);
  const int n_rows = static_cast<int>(data.rows.rows());
  auto [dist, row_to_slot] =
      EmpiricalDistribution::from_rows_mapped(data.rows, data.weights);
  if (dist.size() != n_rows)
    throw covpart::InputError(
        "synthesize: duplicate rows break the uniform-weight requirement; "
        "deduplicate the input first");

  int min_count = 0;
  if (min_cell == "auto")
    min_count = n_rows / flags.k;
  else
    min_count = std::stoi(min_cell);

  auto run = run_algorithm(dist, flags);
  auto equalized = covpart::equalize_min_cell_size(dist, run.partition, min_count);
  const auto synth = covpart::synthetic_data(dist, equalized);
  const auto report =
      covpart::covariance_loss(dist, equalized, flags.tensor_orders);

  // one output row per input row
  Eigen::MatrixXd out_rows(n_rows, dist.dim());
  for (int i = 0; i < n_rows; ++i)
    out_rows.row(i) = synth.rows.row(row_to_slot[static_cast<size_t>(i)]);
  covpart::write_csv(synth_out, out_rows);

  const Eigen::VectorXd synth_mean =
      out_rows.colwise().sum().transpose() / n_rows;
  json doc = base_document(flags);
  doc["min_cell"] = min_count;
  doc["partition"] = json::parse(covpart::to_json(equalized));
  doc["report"] = report_json(report, run);
  doc["synthetic"] = {
      {"rows", n_rows},
      {"anonymity_level", synth.anonymity_level},
      {"output", synth_out},
      {"mean_error", (synth_mean - dist.mean()).cwiseAbs().maxCoeff()}};
  if (!run.diagnostics.is_null()) doc["general"] = run.diagnostics;
  emit(doc, flags.out);
  return 0;
}

int cmd_sweep(const RunFlags& flags, const std::vector<int>& k_list,
              const std::vector<std::string>& algos, int seeds) {
  if (seeds < 1) throw covpart::InputError("sweep: seeds must be >= 1");
  for (const std::string& algo : algos)
    if (algo != "pinning" && algo != "general" && algo != "kmeans" &&
        algo != "epsnet")
      throw covpart::InputError("sweep: unknown algorithm " + algo);
  const auto dist = load_distribution(flags);
  json results = json::array();
  for (const std::string& algo : algos) {
    for (int k : k_list) {
      RunFlags run_flags = flags;
      run_flags.algo = algo;
      run_flags.k = k;
      std::vector<double> losses;
      for (int s = 0; s < seeds; ++s) {
        run_flags.seed = flags.seed + static_cast<std::uint64_t>(s);
        auto run = run_algorithm(dist, run_flags);
        losses.push_back(
            covpart::covariance_loss(dist, run.partition).loss_frobenius);
      }
      std::vector<double> sorted = losses;
      std::sort(sorted.begin(), sorted.end());
      const double median =
          seeds % 2 ? sorted[static_cast<size_t>(seeds / 2)]
                    : 0.5 * (sorted[static_cast<size_t>(seeds / 2 - 1)] +
                             sorted[static_cast<size_t>(seeds / 2)]);
      results.push_back(json{{"algo", algo},
                             {"k", k},
                             {"losses", losses},
                             {"median", median}});
    }
  }
  json doc;
  doc["schema"] = 1;
  doc["input"] = flags.input;
  doc["k_list"] = k_list;
  doc["algos"] = algos;
  doc["seeds"] = seeds;
  doc["seed_base"] = flags.seed;
  doc["results"] = std::move(results);
  if (!flags.no_meta) doc["meta"] = {{"generated_at", timestamp()}};
  emit(doc, flags.out);
  return 0;
}

int cmd_oracle(const RunFlags& flags) {
  const auto dist = load_distribution(flags);
  auto best = covpart::brute_force_optimal(dist, flags.k);
  json doc;
  doc["schema"] = 1;
  doc["input"] = flags.input;
  doc["k"] = flags.k;
  doc["optimal_loss"] = best.loss;
  doc["partition"] = json::parse(covpart::to_json(best.partition));
  if (!flags.no_meta) doc["meta"] = {{"generated_at", timestamp()}};
  emit(doc, flags.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covariance-preserving partitions and anonymous synthetic data"};
  app.require_subcommand(1);

  RunFlags part_flags;
  auto* partition = app.add_subcommand(
      "partition", "partition the input and report the covariance loss");
  add_common(partition, part_flags);
  partition->add_option("--out", part_flags.out, "report JSON path");

  RunFlags synth_flags;
  std::string min_cell = "auto";
  std::string synth_out = "synth.csv";
  auto* synthesize = app.add_subcommand(
      "synthesize", "emit anonymous synthetic data for the input");
  add_common(synthesize, synth_flags);
  synthesize->add_option("--min-cell", min_cell,
                         "minimum cell size ('auto' = floor(n/k))");
  synthesize->add_option("--out", synth_out, "synthetic CSV path");
  synthesize->add_option("--report", synth_flags.out, "report JSON path");

  RunFlags sweep_flags;
  std::vector<int> k_list;
  std::vector<std::string> algos{"general"};
  int seeds = 8;
  auto* sweep =
      app.add_subcommand("sweep", "loss-vs-k trend data over seed corpora");
  sweep->add_option("--input", sweep_flags.input, "input CSV")->required();
  sweep->add_option("--k-list", k_list, "k values")->delimiter(',')->required();
  sweep->add_option("--algos", algos, "algorithms to sweep")->delimiter(',');
  sweep->add_option("--seeds", seeds, "seeds per (algo, k)");
  sweep->add_option("--seed", sweep_flags.seed, "base seed");
  sweep->add_option("--c", sweep_flags.c, "general clusterer constant c");
  sweep->add_flag("--paper-mode", sweep_flags.paper_mode, "literal constants");
  sweep->add_flag("--weights", sweep_flags.weights, "last column = weights");
  sweep->add_flag("--no-meta", sweep_flags.no_meta, "omit the timestamp block");
  sweep->add_option("--out", sweep_flags.out, "sweep JSON path");

  RunFlags oracle_flags;
  auto* oracle = app.add_subcommand(
      "oracle", "exhaustive optimal partition of a tiny input");
  oracle->add_option("--input", oracle_flags.input, "input CSV")->required();
  oracle->add_option("--k", oracle_flags.k, "cell budget")->required();
  oracle->add_flag("--weights", oracle_flags.weights, "last column = weights");
  oracle->add_flag("--no-meta", oracle_flags.no_meta, "omit the timestamp block");
  oracle->add_option("--out", oracle_flags.out, "JSON path");

  try {
    app.parse(argc, argv);
    if (partition->parsed()) return cmd_partition(part_flags);
    if (synthesize->parsed())
      return cmd_synthesize(synth_flags, min_cell, synth_out);
    if (sweep->parsed()) return cmd_sweep(sweep_flags, k_list, algos, seeds);
    if (oracle->parsed()) return cmd_oracle(oracle_flags);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const covpart::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const covpart::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
