#include "lacuna/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "lacuna/classification.hpp"
#include "lacuna/clustering.hpp"
#include "lacuna/imputation.hpp"
#include "lacuna/random.hpp"

namespace lacuna {

namespace {

using nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";

// Sub-stream tags so every random decision in a run draws from its own
// engine.
enum Stream : std::uint64_t {
  kSimFull = 101,
  kSeedCluster = 201,
  kSeedEuclid = 210,
  kSplit = 301,
  kSimTrain = 302,
  kSimTest = 303,
  kVote = 304,
};

bool is_clustering_method(const std::string& method) {
  return method.rfind("kmpp-", 0) == 0 || method.rfind("scalable-", 0) == 0 ||
         method.rfind("kmeans-", 0) == 0;
}

// "" for direct methods, otherwise the imputer suffix (zi, mi, knni).
std::string imputer_suffix(const std::string& method) {
  const auto pos = method.find("-after-");
  return pos == std::string::npos ? "" : method.substr(pos + 7);
}

ObservedTable run_imputer(const ObservedTable& table, const std::string& suffix,
                          std::size_t knni_k) {
  if (suffix == "zi") return impute_zero(table);
  if (suffix == "mi") return impute_mean(table);
  if (suffix == "knni") return impute_knn(table, knni_k);
  throw std::invalid_argument("unknown imputation suffix: " + suffix);
}

std::string dataset_id(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

std::string format_fixed(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string format_general(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (datasets.empty()) throw std::invalid_argument("ExperimentConfig: no datasets");
  if (mechanisms.empty()) throw std::invalid_argument("ExperimentConfig: no mechanisms");
  if (methods.empty()) throw std::invalid_argument("ExperimentConfig: no methods");
  const auto& known = known_methods();
  for (const auto& m : methods)
    if (std::find(known.begin(), known.end(), m) == known.end())
      throw std::invalid_argument("ExperimentConfig: unknown method \"" + m + "\"");
  if (runs < 1) throw std::invalid_argument("ExperimentConfig: runs must be at least 1");
  if (workers < 1) throw std::invalid_argument("ExperimentConfig: workers must be at least 1");
  if (beta && !(*beta > 0.0 && *beta < 1.0))
    throw std::invalid_argument("ExperimentConfig: beta must lie strictly inside (0,1)");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("ExperimentConfig: test_fraction must lie in (0,1)");
  if (cluster_k && *cluster_k < 1)
    throw std::invalid_argument("ExperimentConfig: cluster_k must be at least 1");
  if (knn_k < 1 || imputation_k < 1)
    throw std::invalid_argument("ExperimentConfig: neighbor counts must be at least 1");
  if (max_iter < 1) throw std::invalid_argument("ExperimentConfig: max_iter must be at least 1");
  for (const auto& mech : mechanisms) {
    MissingnessSpec spec;
    spec.mechanism = mech.mechanism;
    spec.target_fraction = mech.fraction;
    spec.quantile = mech.quantile;
    spec.mar_determinant_fraction = mech.determinant_fraction;
    spec.validate();
  }
}

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> methods = {
      "kmpp-awpd",
      "scalable-awpd",
      "kmeans-euclid-after-zi",
      "kmeans-euclid-after-mi",
      "kmeans-euclid-after-knni",
      "knn-awpd",
      "knn-euclid-after-zi",
      "knn-euclid-after-mi",
      "knn-euclid-after-knni",
  };
  return methods;
}

namespace {

LabelColumn parse_label_column(const json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_number_integer()) {
    const auto v = j.get<long long>();
    if (v < 0) throw std::invalid_argument("config: label_column index must be non-negative");
    return static_cast<std::size_t>(v);
  }
  if (j.is_string()) return j.get<std::string>();
  throw std::invalid_argument("config: label_column must be a name, an index, or null");
}

json label_column_to_json(const LabelColumn& col) {
  if (const auto* idx = std::get_if<std::size_t>(&col)) return *idx;
  if (const auto* name = std::get_if<std::string>(&col)) return *name;
  return nullptr;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }

  ExperimentConfig cfg;
  if (!j.contains("datasets") || !j["datasets"].is_array())
    throw std::runtime_error(origin + ": \"datasets\" array is required");
  for (const auto& d : j["datasets"]) {
    DatasetSpec ds;
    ds.path = d.at("path").get<std::string>();
    if (d.contains("label_column")) ds.label_column = parse_label_column(d["label_column"]);
    cfg.datasets.push_back(std::move(ds));
  }

  if (!j.contains("mechanisms") || !j["mechanisms"].is_array())
    throw std::runtime_error(origin + ": \"mechanisms\" array is required");
  for (const auto& m : j["mechanisms"]) {
    MechanismSpec ms;
    ms.mechanism = mechanism_from_string(m.at("mechanism").get<std::string>());
    ms.fraction = m.value("fraction", 0.25);
    ms.quantile = m.value("quantile", 0.5);
    ms.determinant_fraction = m.value("determinant_fraction", 0.5);
    cfg.mechanisms.push_back(ms);
  }

  if (!j.contains("methods") || !j["methods"].is_array())
    throw std::runtime_error(origin + ": \"methods\" array is required");
  cfg.methods = j["methods"].get<std::vector<std::string>>();

  if (j.contains("beta") && !j["beta"].is_null()) cfg.beta = j["beta"].get<double>();
  if (j.contains("cluster_k") && !j["cluster_k"].is_null()) {
    const auto& k = j["cluster_k"];
    if (k.is_string()) {
      if (k.get<std::string>() != "classes")
        throw std::runtime_error(origin + ": cluster_k must be \"classes\" or an integer");
    } else {
      cfg.cluster_k = k.get<std::size_t>();
    }
  }
  cfg.knn_k = j.value("knn_k", cfg.knn_k);
  cfg.imputation_k = j.value("imputation_k", cfg.imputation_k);
  cfg.test_fraction = j.value("test_fraction", cfg.test_fraction);
  cfg.max_iter = j.value("max_iter", cfg.max_iter);
  cfg.runs = j.value("runs", cfg.runs);
  cfg.base_seed = j.value("base_seed", cfg.base_seed);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.output_dir = j.value("output_dir", cfg.output_dir);

  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

namespace {

struct PreparedDataset {
  std::string id;
  LabeledDataset data;  // normalized
  std::size_t cluster_k = 0;
};

struct Cell {
  std::size_t dataset = 0;
  std::size_t mechanism = 0;
  std::size_t run = 0;
};

MissingnessSpec cell_spec(const MechanismSpec& mech, std::uint64_t seed) {
  MissingnessSpec spec;
  spec.mechanism = mech.mechanism;
  spec.target_fraction = mech.fraction;
  spec.seed = seed;
  spec.quantile = mech.quantile;
  spec.mar_determinant_fraction = mech.determinant_fraction;
  return spec;
}

double run_clustering_method(const std::string& method, const PreparedDataset& ds,
                             const ObservedTable& masked, const ExperimentConfig& cfg,
                             std::uint64_t seed) {
  const std::size_t k = ds.cluster_k;
  const std::string suffix = imputer_suffix(method);
  if (suffix.empty()) {
    const double beta = cfg.beta ? *cfg.beta : default_beta(masked);
    const auto model = fit_discrepancy_model(masked, beta);
    std::vector<Centroid> init;
    if (method == "kmpp-awpd") {
      init = seed_kmeans_pp(masked, k, model, rng::mix(seed, kSeedCluster));
    } else {
      init = seed_scalable(masked, k, 2.0 * static_cast<double>(k), 5, model,
                           rng::mix(seed, kSeedCluster));
    }
    const auto state = lloyd_awpd(masked, std::move(init), model, cfg.max_iter);
    return clustering_accuracy(state.membership, ds.data.labels);
  }
  const auto imputed = run_imputer(masked, suffix, cfg.imputation_k);
  const auto result = kmeans_euclid(imputed, k, cfg.max_iter, rng::mix(seed, kSeedEuclid));
  return clustering_accuracy(result.membership, ds.data.labels);
}

double run_classification_method(const std::string& method, const LabeledDataset& train,
                                 const LabeledDataset& test, const ObservedTable& masked_train,
                                 const ObservedTable& masked_test, const ExperimentConfig& cfg,
                                 std::uint64_t seed) {
  const ObservedTable joint = masked_train.concat(masked_test);
  const std::string suffix = imputer_suffix(method);
  std::vector<std::string> predictions;
  if (suffix.empty()) {
    const double beta = cfg.beta ? *cfg.beta : default_beta(joint);
    const auto model = fit_discrepancy_model(joint, beta);
    LabeledDataset masked_train_ds{masked_train, train.labels, train.label_name};
    predictions =
        knn_awpd_predict(masked_train_ds, masked_test, cfg.knn_k, model, rng::mix(seed, kVote));
  } else {
    const auto imputed = run_imputer(joint, suffix, cfg.imputation_k);
    std::vector<std::size_t> head(masked_train.rows()), tail(masked_test.rows());
    std::iota(head.begin(), head.end(), 0);
    std::iota(tail.begin(), tail.end(), masked_train.rows());
    LabeledDataset imputed_train{imputed.take_rows(head), train.labels, train.label_name};
    predictions = knn_euclid_predict(imputed_train, imputed.take_rows(tail), cfg.knn_k,
                                     rng::mix(seed, kVote));
  }
  return classification_accuracy(predictions, test.labels);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();

  std::vector<PreparedDataset> datasets;
  datasets.reserve(config.datasets.size());
  for (const auto& spec : config.datasets) {
    PreparedDataset ds;
    ds.id = dataset_id(spec.path);
    CsvOptions options;
    options.label_column = spec.label_column;
    ds.data = load_csv(spec.path, options);
    ds.data.table = zscore_normalize(ds.data.table);
    ds.cluster_k = config.cluster_k ? *config.cluster_k : ds.data.class_count();
    datasets.push_back(std::move(ds));
  }

  const bool wants_clustering = std::any_of(config.methods.begin(), config.methods.end(),
                                            [](const auto& m) { return is_clustering_method(m); });
  const bool wants_classification = std::any_of(config.methods.begin(), config.methods.end(),
                                                [](const auto& m) { return !is_clustering_method(m); });

  std::vector<Cell> cells;
  for (std::size_t d = 0; d < datasets.size(); ++d)
    for (std::size_t m = 0; m < config.mechanisms.size(); ++m)
      for (std::size_t r = 0; r < config.runs; ++r) cells.push_back({d, m, r});

  std::vector<RunRecord> records(cells.size() * config.methods.size());

  auto run_cell = [&](const Cell& cell, std::size_t slot_base) {
    const auto& ds = datasets[cell.dataset];
    const auto& mech = config.mechanisms[cell.mechanism];
    const std::uint64_t seed = config.base_seed + cell.run;

    ObservedTable masked_full;
    LabeledDataset train, test;
    ObservedTable masked_train, masked_test;
    try {
      if (wants_clustering)
        masked_full = apply_missingness(ds.data.table, cell_spec(mech, rng::mix(seed, kSimFull)));
      if (wants_classification) {
        std::tie(train, test) =
            split_train_test(ds.data, config.test_fraction, rng::mix(seed, kSplit));
        masked_train = apply_missingness(train.table, cell_spec(mech, rng::mix(seed, kSimTrain)));
        masked_test = apply_missingness(test.table, cell_spec(mech, rng::mix(seed, kSimTest)));
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("experiment cell [dataset=" + ds.id +
                               " mechanism=" + to_string(mech.mechanism) +
                               " seed=" + std::to_string(seed) + "]: " + e.what());
    }

    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
      const auto& method = config.methods[mi];
      RunRecord rec;
      rec.dataset = ds.id;
      rec.mechanism = to_string(mech.mechanism);
      rec.fraction = mech.fraction;
      rec.method = method;
      rec.seed = seed;
      try {
        rec.accuracy = is_clustering_method(method)
                           ? run_clustering_method(method, ds, masked_full, config, seed)
                           : run_classification_method(method, train, test, masked_train,
                                                       masked_test, config, seed);
      } catch (const std::exception& e) {
        throw std::runtime_error("experiment cell [dataset=" + ds.id +
                                 " mechanism=" + to_string(mech.mechanism) +
                                 " method=" + method + " seed=" + std::to_string(seed) +
                                 "]: " + e.what());
      }
      records[slot_base + mi] = std::move(rec);
    }
  };

  const std::size_t workers = std::min<std::size_t>(config.workers, cells.size());
  if (workers <= 1) {
    for (std::size_t c = 0; c < cells.size(); ++c) run_cell(cells[c], c * config.methods.size());
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t c = next.fetch_add(1);
        if (c >= cells.size()) break;
        try {
          run_cell(cells[c], c * config.methods.size());
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  ExperimentReport report;
  report.config = config;
  report.records = std::move(records);
  report.aggregates = aggregate_runs(report.records);
  return report;
}

namespace {

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["datasets"] = json::array();
  for (const auto& d : cfg.datasets)
    j["datasets"].push_back({{"path", d.path}, {"label_column", label_column_to_json(d.label_column)}});
  j["mechanisms"] = json::array();
  for (const auto& m : cfg.mechanisms)
    j["mechanisms"].push_back({{"mechanism", to_string(m.mechanism)},
                               {"fraction", m.fraction},
                               {"quantile", m.quantile},
                               {"determinant_fraction", m.determinant_fraction}});
  j["methods"] = cfg.methods;
  j["beta"] = cfg.beta ? json(*cfg.beta) : json(nullptr);
  j["cluster_k"] = cfg.cluster_k ? json(*cfg.cluster_k) : json("classes");
  j["knn_k"] = cfg.knn_k;
  j["imputation_k"] = cfg.imputation_k;
  j["test_fraction"] = cfg.test_fraction;
  j["max_iter"] = cfg.max_iter;
  j["runs"] = cfg.runs;
  j["base_seed"] = cfg.base_seed;
  j["workers"] = cfg.workers;
  j["output_dir"] = cfg.output_dir;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_report: cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("emit_report: write failed for " + path);
}

}  // namespace

std::vector<std::string> emit_report(const ExperimentReport& report, const std::string& outdir) {
  if (report.records.empty()) throw std::invalid_argument("emit_report: empty report");
  std::filesystem::create_directories(outdir);
  std::vector<std::string> written;

  // One aggregate table per mechanism, rows sorted like the aggregates.
  std::set<std::string> mechanisms;
  for (const auto& row : report.aggregates) mechanisms.insert(row.mechanism);
  for (const auto& mech : mechanisms) {
    const std::string path = outdir + "/table_" + mech + ".csv";
    std::ostringstream out;
    out << "dataset,mechanism,fraction,method,runs,mean,std,best\n";
    for (const auto& row : report.aggregates) {
      if (row.mechanism != mech) continue;
      out << row.dataset << ',' << row.mechanism << ',' << format_general(row.fraction) << ','
          << row.method << ',' << row.runs << ',' << format_fixed(row.mean) << ','
          << format_fixed(row.stddev) << ',' << (row.best ? 1 : 0) << '\n';
    }
    write_text(path, out.str());
    written.push_back(path);
  }

  // Long-format per-dataset plot data.
  std::set<std::string> ids;
  for (const auto& rec : report.records) ids.insert(rec.dataset);
  for (const auto& id : ids) {
    const std::string path = outdir + "/plot_" + id + ".csv";
    std::ostringstream out;
    out << "mechanism,fraction,method,seed,accuracy\n";
    for (const auto& rec : report.records) {
      if (rec.dataset != id) continue;
      out << rec.mechanism << ',' << format_general(rec.fraction) << ',' << rec.method << ','
          << rec.seed << ',' << format_fixed(rec.accuracy) << '\n';
    }
    write_text(path, out.str());
    written.push_back(path);
  }

  // Every run record in one file; `lacuna report` re-aggregates this format.
  {
    const std::string path = outdir + "/records.csv";
    std::ostringstream out;
    out << "dataset,mechanism,fraction,method,seed,accuracy\n";
    for (const auto& rec : report.records)
      out << rec.dataset << ',' << rec.mechanism << ',' << format_general(rec.fraction) << ','
          << rec.method << ',' << rec.seed << ',' << format_fixed(rec.accuracy) << '\n';
    write_text(path, out.str());
    written.push_back(path);
  }

  // Manifest: the resolved config, readable back by parse_config, plus the
  // tool version. Skipped for re-aggregations that carry no config.
  if (!report.config.datasets.empty()) {
    json manifest = config_to_json(report.config);
    manifest["tool_version"] = kToolVersion;
    const std::string manifest_path = outdir + "/manifest.json";
    write_text(manifest_path, manifest.dump(2) + "\n");
    written.push_back(manifest_path);
  }

  return written;
}

}  // namespace lacuna
