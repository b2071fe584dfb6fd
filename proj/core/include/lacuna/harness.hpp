#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lacuna/dataset.hpp"
#include "lacuna/evaluation.hpp"
#include "lacuna/missingness.hpp"

namespace lacuna {

/// One dataset entry of an experiment.
struct DatasetSpec {
  std::string path;
  LabelColumn label_column{};  // default: last column
};

/// One (mechanism, fraction) cell of an experiment.
struct MechanismSpec {
  Mechanism mechanism = Mechanism::MCAR;
  double fraction = 0.25;
  double quantile = 0.5;
  double determinant_fraction = 0.5;
};

/// Full experiment description. Defaults follow the module defaults; every
/// resolved value is echoed into the run manifest.
struct ExperimentConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<MechanismSpec> mechanisms;
  std::vector<std::string> methods;
  std::optional<double> beta;          // unset: per-table default
  std::optional<std::size_t> cluster_k;  // unset: the dataset's class count
  std::size_t knn_k = 5;
  std::size_t imputation_k = 5;
  double test_fraction = 0.2;
  std::size_t max_iter = 100;
  std::size_t runs = 20;
  std::uint64_t base_seed = 1;
  std::size_t workers = 1;
  std::string output_dir = "out";

  void validate() const;
};

/// All known method ids, in canonical order.
const std::vector<std::string>& known_methods();

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<RunRecord> records;       // deterministic order
  std::vector<AggregateRow> aggregates;
};

/// Parses the JSON config format documented in the README. A run manifest
/// (which embeds the same keys) is accepted unchanged.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

/// Runs every (dataset, mechanism, run, method) cell. Within one
/// (dataset, mechanism, run) cell all methods see the same masked data.
/// Fully deterministic for a given config, including under workers > 1.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Writes per-mechanism aggregate tables, per-dataset long-format plot data,
/// and a manifest that can be fed back to run_experiment. Returns the paths
/// written.
std::vector<std::string> emit_report(const ExperimentReport& report, const std::string& outdir);

}  // namespace lacuna
