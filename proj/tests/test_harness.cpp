#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "lacuna/harness.hpp"
#include "support/synthetic.hpp"

using namespace lacuna;

namespace {

std::string data_path(const std::string& name) {
  return std::string(LACUNA_DATA_DIR) + "/" + name;
}

std::string scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.datasets = {{data_path("iris.csv"), std::monostate{}}};
  cfg.mechanisms = {{Mechanism::MCAR, 0.25, 0.5, 0.5}};
  cfg.methods = {"kmpp-awpd", "kmeans-euclid-after-zi"};
  cfg.runs = 3;
  cfg.base_seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("parse_config reads the documented keys and applies defaults") {
  const std::string text = R"({
    "datasets": [{"path": "data/iris.csv", "label_column": "species"}],
    "mechanisms": [{"mechanism": "mcar", "fraction": 0.25}],
    "methods": ["kmpp-awpd", "knn-awpd"],
    "runs": 5,
    "base_seed": 3
  })";
  const auto cfg = parse_config_text(text, "inline");
  CHECK(cfg.datasets.size() == 1);
  CHECK(std::get<std::string>(cfg.datasets[0].label_column) == "species");
  CHECK(cfg.mechanisms.size() == 1);
  CHECK(cfg.mechanisms[0].fraction == 0.25);
  CHECK(cfg.methods.size() == 2);
  CHECK(cfg.runs == 5);
  CHECK(cfg.base_seed == 3);
  // defaults
  CHECK(cfg.knn_k == 5);
  CHECK(cfg.test_fraction == 0.2);
  CHECK(cfg.max_iter == 100);
  CHECK_FALSE(cfg.beta.has_value());
  CHECK_FALSE(cfg.cluster_k.has_value());
}

TEST_CASE("parse_config rejects malformed input") {
  CHECK_THROWS(parse_config_text("{not json", "inline"));
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"mechanisms": [], "methods": []})", "inline"),
                       doctest::Contains("datasets"), std::runtime_error);
  const std::string unknown_method = R"({
    "datasets": [{"path": "x.csv"}],
    "mechanisms": [{"mechanism": "mcar"}],
    "methods": ["definitely-not-a-method"]
  })";
  CHECK_THROWS_AS(parse_config_text(unknown_method, "inline"), std::invalid_argument);
}

TEST_CASE("run_experiment produces one record per cell and is deterministic") {
  auto cfg = small_config();
  const auto report = run_experiment(cfg);
  CHECK(report.records.size() == 1 * 1 * 3 * 2);  // datasets * mechanisms * runs * methods
  CHECK(report.aggregates.size() == 2);
  for (const auto& rec : report.records) {
    CHECK(rec.accuracy >= 0.0);
    CHECK(rec.accuracy <= 1.0);
    CHECK(rec.dataset == "iris");
    CHECK(rec.mechanism == "mcar");
  }

  const auto again = run_experiment(cfg);
  REQUIRE(again.records.size() == report.records.size());
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    CHECK(again.records[i].accuracy == report.records[i].accuracy);
    CHECK(again.records[i].seed == report.records[i].seed);
    CHECK(again.records[i].method == report.records[i].method);
  }
}

TEST_CASE("zero missingness makes direct and imputed methods coincide") {
  ExperimentConfig cfg;
  cfg.datasets = {{data_path("blobs3.csv"), std::monostate{}}};
  cfg.mechanisms = {{Mechanism::MCAR, 0.0, 0.5, 0.5}};
  cfg.methods = {"kmpp-awpd", "kmeans-euclid-after-zi", "knn-awpd", "knn-euclid-after-zi"};
  cfg.runs = 2;
  cfg.base_seed = 5;
  const auto report = run_experiment(cfg);

  // group accuracies per run
  std::map<std::uint64_t, std::map<std::string, double>> by_seed;
  for (const auto& rec : report.records) by_seed[rec.seed][rec.method] = rec.accuracy;
  for (const auto& [seed, methods] : by_seed) {
    CHECK(methods.at("kmpp-awpd") == methods.at("kmeans-euclid-after-zi"));
    CHECK(methods.at("knn-awpd") == methods.at("knn-euclid-after-zi"));
  }
}

TEST_CASE("worker count does not change the records") {
  auto cfg = small_config();
  cfg.workers = 1;
  const auto a = run_experiment(cfg);
  cfg.workers = 4;
  const auto b = run_experiment(cfg);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].accuracy == b.records[i].accuracy);
    CHECK(a.records[i].method == b.records[i].method);
  }
}

TEST_CASE("emit_report writes tables, plots, records and a manifest") {
  const auto cfg = small_config();
  const auto report = run_experiment(cfg);
  const auto dir = scratch_dir("lacuna_report_test");
  const auto written = emit_report(report, dir);

  CHECK(std::filesystem::exists(dir + "/table_mcar.csv"));
  CHECK(std::filesystem::exists(dir + "/plot_iris.csv"));
  CHECK(std::filesystem::exists(dir + "/records.csv"));
  CHECK(std::filesystem::exists(dir + "/manifest.json"));
  CHECK(written.size() == 4);

  const auto table = slurp(dir + "/table_mcar.csv");
  CHECK(table.find("dataset,mechanism,fraction,method,runs,mean,std,best") == 0);
  CHECK(table.find("iris,mcar,0.25,kmpp-awpd,3,") != std::string::npos);

  // exactly one best flag per row group
  std::size_t best_count = 0;
  std::istringstream lines(table);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line))
    if (line.size() >= 2 && line.substr(line.size() - 2) == ",1") ++best_count;
  CHECK(best_count == 1);
}

TEST_CASE("manifest round-trips through parse_config to the same records") {
  const auto cfg = small_config();
  const auto report = run_experiment(cfg);
  const auto dir = scratch_dir("lacuna_manifest_test");
  emit_report(report, dir);

  const auto reparsed = parse_config(dir + "/manifest.json");
  const auto second = run_experiment(reparsed);
  const auto dir2 = scratch_dir("lacuna_manifest_test2");
  emit_report(second, dir2);

  CHECK(slurp(dir + "/records.csv") == slurp(dir2 + "/records.csv"));
  CHECK(slurp(dir + "/table_mcar.csv") == slurp(dir2 + "/table_mcar.csv"));
}

TEST_CASE("experiment errors carry cell context") {
  ExperimentConfig cfg = small_config();
  cfg.datasets = {{data_path("does_not_exist.csv"), std::monostate{}}};
  CHECK_THROWS_AS(run_experiment(cfg), std::runtime_error);

  // infeasible missingness fraction surfaces the failing cell
  ExperimentConfig bad = small_config();
  bad.mechanisms = {{Mechanism::MNAR1, 0.6, 0.5, 0.5}};
  CHECK_THROWS_WITH_AS(run_experiment(bad), doctest::Contains("dataset=iris"),
                       std::runtime_error);
}

TEST_CASE("emit_report rejects an empty report") {
  ExperimentReport empty;
  CHECK_THROWS_AS(emit_report(empty, scratch_dir("lacuna_empty_report")), std::invalid_argument);
}

TEST_CASE("config validation catches bad values") {
  auto cfg = small_config();
  cfg.runs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.beta = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.methods = {"nope"};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
