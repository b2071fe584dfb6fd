// lacuna: cluster and classify datasets with missing attribute values
// directly, simulate missingness mechanisms, run imputation baselines, and
// drive full benchmark experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lacuna/classification.hpp"
#include "lacuna/clustering.hpp"
#include "lacuna/dataset.hpp"
#include "lacuna/discrepancy.hpp"
#include "lacuna/evaluation.hpp"
#include "lacuna/harness.hpp"
#include "lacuna/imputation.hpp"
#include "lacuna/missingness.hpp"
#include "lacuna/random.hpp"

namespace {

lacuna::LabelColumn make_label_column(const std::string& spec) {
  if (spec.empty()) return std::monostate{};
  // All digits -> column index, otherwise a column name.
  if (spec.find_first_not_of("0123456789") == std::string::npos)
    return static_cast<std::size_t>(std::stoull(spec));
  return spec;
}

lacuna::LabeledDataset load_input(const std::string& path, const std::string& label_column,
                                  bool normalize) {
  lacuna::CsvOptions options;
  options.label_column = make_label_column(label_column);
  auto data = lacuna::load_csv(path, options);
  if (normalize) data.table = lacuna::zscore_normalize(data.table);
  return data;
}

void write_lines(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

struct SimulateArgs {
  std::string input, out, label_column, mechanism = "mcar";
  double fraction = 0.25, quantile = 0.5, determinant_fraction = 0.5;
  std::uint64_t seed = 0;
  bool normalize = false;
};

int cmd_simulate(const SimulateArgs& args) {
  auto data = load_input(args.input, args.label_column, args.normalize);
  lacuna::MissingnessSpec spec;
  spec.mechanism = lacuna::mechanism_from_string(args.mechanism);
  spec.target_fraction = args.fraction;
  spec.seed = args.seed;
  spec.quantile = args.quantile;
  spec.mar_determinant_fraction = args.determinant_fraction;
  data.table = lacuna::apply_missingness(data.table, spec);
  lacuna::write_csv(data, args.out);
  std::cout << "masked " << data.table.rows() * data.table.cols() - data.table.observed_count()
            << " of " << data.table.rows() * data.table.cols() << " cells -> " << args.out << "\n";
  return 0;
}

struct ImputeArgs {
  std::string input, out, label_column, method = "mean";
  std::size_t k = 5;
  bool normalize = false;
};

int cmd_impute(const ImputeArgs& args) {
  auto data = load_input(args.input, args.label_column, args.normalize);
  if (args.method == "zero")
    data.table = lacuna::impute_zero(data.table);
  else if (args.method == "mean")
    data.table = lacuna::impute_mean(data.table);
  else if (args.method == "knn")
    data.table = lacuna::impute_knn(data.table, args.k);
  else
    throw std::runtime_error("unknown imputation method: " + args.method);
  lacuna::write_csv(data, args.out);
  std::cout << "imputed table -> " << args.out << "\n";
  return 0;
}

struct ClusterArgs {
  std::string input, label_column, algo = "kmpp-awpd", out_prefix = "cluster";
  std::string model_in, model_out;
  std::size_t k = 0, max_iter = lacuna::kDefaultMaxIter;
  std::optional<double> beta;
  std::vector<std::uint64_t> seeds{0};
  bool normalize = false;
};

lacuna::DiscrepancyModel resolve_model(const std::string& model_in, const std::string& model_out,
                                       const lacuna::ObservedTable& table,
                                       const std::optional<double>& beta) {
  auto model = model_in.empty()
                   ? lacuna::fit_discrepancy_model(table,
                                                   beta ? *beta : lacuna::default_beta(table))
                   : lacuna::load_model(model_in);
  if (!model_out.empty()) lacuna::save_model(model, model_out);
  return model;
}

int cmd_cluster(const ClusterArgs& args) {
  auto data = load_input(args.input, args.label_column, args.normalize);
  const std::size_t k = args.k ? args.k : data.class_count();

  std::ostringstream membership_csv, trace_csv;
  membership_csv << "seed,row,cluster\n";
  trace_csv << "seed,iteration,objective\n";

  for (const auto seed : args.seeds) {
    std::vector<std::size_t> membership;
    std::vector<double> trace;
    if (args.algo == "kmeans-euclid") {
      const auto result = lacuna::kmeans_euclid(data.table, k, args.max_iter, seed);
      membership = result.membership;
      trace = result.objective_trace;
    } else {
      const auto model = resolve_model(args.model_in, args.model_out, data.table, args.beta);
      std::vector<lacuna::Centroid> init;
      if (args.algo == "kmpp-awpd")
        init = lacuna::seed_kmeans_pp(data.table, k, model, seed);
      else if (args.algo == "scalable-awpd")
        init = lacuna::seed_scalable(data.table, k, 2.0 * static_cast<double>(k), 5, model, seed);
      else
        throw std::runtime_error("unknown clustering algorithm: " + args.algo);
      const auto state = lacuna::lloyd_awpd(data.table, std::move(init), model, args.max_iter);
      membership = state.membership;
      trace = state.objective_trace;
    }

    for (std::size_t i = 0; i < membership.size(); ++i)
      membership_csv << seed << ',' << i << ',' << membership[i] << '\n';
    char buf[48];
    for (std::size_t t = 0; t < trace.size(); ++t) {
      std::snprintf(buf, sizeof(buf), "%.9g", trace[t]);
      trace_csv << seed << ',' << t + 1 << ',' << buf << '\n';
    }
    const double accuracy = lacuna::clustering_accuracy(membership, data.labels);
    std::printf("seed %llu: k=%zu iterations=%zu accuracy=%.4f\n",
                static_cast<unsigned long long>(seed), k, trace.size(), accuracy);
  }

  write_lines(args.out_prefix + "_membership.csv", membership_csv.str());
  write_lines(args.out_prefix + "_trace.csv", trace_csv.str());
  std::cout << "wrote " << args.out_prefix << "_membership.csv and " << args.out_prefix
            << "_trace.csv\n";
  return 0;
}

struct ClassifyArgs {
  std::string train, test, out = "predictions.csv", label_column;
  std::string model_in, model_out;
  std::size_t k = 5;
  std::optional<double> beta;
  std::uint64_t seed = 0;
  bool normalize = false;
  bool test_unlabeled = false;
};

int cmd_classify(const ClassifyArgs& args) {
  auto train = load_input(args.train, args.label_column, false);
  lacuna::ObservedTable test_table;
  std::vector<std::string> test_labels;
  if (args.test_unlabeled) {
    test_table = lacuna::load_table_csv(args.test);
  } else {
    lacuna::CsvOptions options;
    options.label_column = make_label_column(args.label_column);
    auto test = lacuna::load_csv(args.test, options);
    test_table = std::move(test.table);
    test_labels = std::move(test.labels);
  }
  if (args.normalize) {
    // Normalize train and test jointly so both live in the same units.
    const std::size_t n_train = train.table.rows();
    auto joint = lacuna::zscore_normalize(train.table.concat(test_table));
    std::vector<std::size_t> head(n_train), tail(test_table.rows());
    std::iota(head.begin(), head.end(), 0);
    std::iota(tail.begin(), tail.end(), n_train);
    train.table = joint.take_rows(head);
    test_table = joint.take_rows(tail);
  }

  const auto joint = train.table.concat(test_table);
  const auto model = resolve_model(args.model_in, args.model_out, joint, args.beta);
  const auto predictions =
      lacuna::knn_awpd_predict(train, test_table, args.k, model, args.seed);

  std::ostringstream out;
  out << "row," << train.label_name << "\n";
  for (std::size_t i = 0; i < predictions.size(); ++i) out << i << ',' << predictions[i] << '\n';
  write_lines(args.out, out.str());
  std::cout << "wrote " << predictions.size() << " predictions -> " << args.out << "\n";
  if (!test_labels.empty())
    std::printf("accuracy=%.4f\n", lacuna::classification_accuracy(predictions, test_labels));
  return 0;
}

struct ReportArgs {
  std::string records, outdir = "out";
};

// Re-aggregates a records.csv produced by `experiment` (or assembled by
// hand) into per-mechanism tables.
int cmd_report(const ReportArgs& args) {
  std::ifstream in(args.records);
  if (!in) throw std::runtime_error("cannot open " + args.records);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty records file: " + args.records);

  std::vector<lacuna::RunRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    lacuna::RunRecord rec;
    std::string fraction, seed, accuracy;
    if (!std::getline(ss, rec.dataset, ',') || !std::getline(ss, rec.mechanism, ',') ||
        !std::getline(ss, fraction, ',') || !std::getline(ss, rec.method, ',') ||
        !std::getline(ss, seed, ',') || !std::getline(ss, accuracy))
      throw std::runtime_error(args.records + ": malformed line " + std::to_string(lineno));
    rec.fraction = std::stod(fraction);
    rec.seed = std::stoull(seed);
    rec.accuracy = std::stod(accuracy);
    records.push_back(std::move(rec));
  }

  lacuna::ExperimentReport report;
  report.records = std::move(records);
  report.aggregates = lacuna::aggregate_runs(report.records);
  // Reuse the table/plot writers; the embedded default config marks the
  // manifest as not applicable for a re-aggregation.
  const auto written = lacuna::emit_report(report, args.outdir);
  for (const auto& path : written) std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_experiment(const std::string& config_path) {
  const auto config = lacuna::parse_config(config_path);
  const auto report = lacuna::run_experiment(config);
  const auto written = lacuna::emit_report(report, config.output_dir);
  for (const auto& path : written) std::cout << "wrote " << path << "\n";
  std::cout << report.records.size() << " run records, " << report.aggregates.size()
            << " aggregate rows\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cluster and classify datasets with missing attribute values"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "mask cells of a complete dataset");
  simulate->add_option("input", sim.input, "input CSV")->required();
  simulate->add_option("--mechanism", sim.mechanism, "mcar|mar|mnar1|mnar2");
  simulate->add_option("--fraction", sim.fraction, "target fraction of masked cells");
  simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_option("--quantile", sim.quantile, "own-value threshold for mnar1/mnar2");
  simulate->add_option("--determinant-fraction", sim.determinant_fraction,
                       "share of never-masked attributes for mar/mnar2");
  simulate->add_option("--label-column", sim.label_column, "label column name or index");
  simulate->add_flag("--normalize", sim.normalize, "z-score normalize before masking");
  simulate->add_option("--out", sim.out, "output CSV")->required();

  ImputeArgs imp;
  auto* impute = app.add_subcommand("impute", "fill missing cells");
  impute->add_option("input", imp.input, "input CSV")->required();
  impute->add_option("--method", imp.method, "zero|mean|knn");
  impute->add_option("--k", imp.k, "neighbor count for knn imputation");
  impute->add_option("--label-column", imp.label_column, "label column name or index");
  impute->add_flag("--normalize", imp.normalize, "z-score normalize before imputing");
  impute->add_option("--out", imp.out, "output CSV")->required();

  ClusterArgs clu;
  auto* cluster = app.add_subcommand("cluster", "cluster a dataset, missing values allowed");
  cluster->add_option("input", clu.input, "input CSV")->required();
  cluster->add_option("--algo", clu.algo, "kmpp-awpd|scalable-awpd|kmeans-euclid");
  cluster->add_option("--k", clu.k, "cluster count (default: class count)");
  double cluster_beta = -1.0;
  cluster->add_option("--beta", cluster_beta, "AWPD blend in (0,1)");
  cluster->add_option("--seeds", clu.seeds, "one run per seed")->expected(-1);
  cluster->add_option("--max-iter", clu.max_iter, "iteration cap");
  cluster->add_option("--label-column", clu.label_column, "label column name or index");
  cluster->add_flag("--normalize", clu.normalize, "z-score normalize first");
  cluster->add_option("--out-prefix", clu.out_prefix, "output file prefix");
  cluster->add_option("--model", clu.model_in, "load a fitted model instead of fitting");
  cluster->add_option("--save-model", clu.model_out, "write the fitted model to a file");

  ClassifyArgs cls;
  auto* classify = app.add_subcommand("classify", "kNN classification, missing values allowed");
  classify->add_option("--train", cls.train, "training CSV")->required();
  classify->add_option("--test", cls.test, "test CSV")->required();
  classify->add_option("--k", cls.k, "neighbor count");
  double classify_beta = -1.0;
  classify->add_option("--beta", classify_beta, "AWPD blend in (0,1)");
  classify->add_option("--seed", cls.seed, "tie-break seed");
  classify->add_option("--label-column", cls.label_column, "label column name or index");
  classify->add_flag("--normalize", cls.normalize, "z-score normalize train+test jointly");
  classify->add_flag("--test-unlabeled", cls.test_unlabeled, "test file has no label column");
  classify->add_option("--out", cls.out, "predictions CSV");
  classify->add_option("--model", cls.model_in, "load a fitted model instead of fitting");
  classify->add_option("--save-model", cls.model_out, "write the fitted model to a file");

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "aggregate a records.csv into tables");
  report->add_option("--records", rep.records, "records CSV")->required();
  report->add_option("--outdir", rep.outdir, "output directory");

  std::string config_path;
  auto* experiment = app.add_subcommand("experiment", "run a full benchmark experiment");
  experiment->add_option("--config", config_path, "experiment config JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*impute) return cmd_impute(imp);
    if (*cluster) {
      if (cluster_beta > 0.0) clu.beta = cluster_beta;
      return cmd_cluster(clu);
    }
    if (*classify) {
      if (classify_beta > 0.0) cls.beta = classify_beta;
      return cmd_classify(cls);
    }
    if (*report) return cmd_report(rep);
    if (*experiment) return cmd_experiment(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
