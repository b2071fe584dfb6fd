#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "lacuna/classification.hpp"
#include "lacuna/clustering.hpp"
#include "lacuna/discrepancy.hpp"
#include "lacuna/evaluation.hpp"
#include "lacuna/missingness.hpp"

namespace {

lacuna::ObservedTable random_table(std::size_t n, std::size_t m, double missing_rate,
                                   std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  auto uniform = [&] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  std::vector<double> values(n * m);
  std::vector<std::uint8_t> mask(n * m, 1);
  for (auto& v : values) v = uniform() * 4.0 - 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 1; l < m; ++l)
      if (uniform() < missing_rate) mask[i * m + l] = 0;  // column 0 keeps rows alive
  }
  std::vector<std::string> names;
  for (std::size_t l = 0; l < m; ++l) names.push_back("a" + std::to_string(l));
  return lacuna::ObservedTable::from_parts(n, m, std::move(values), std::move(mask),
                                           std::move(names));
}

void BM_awpd_pair(benchmark::State& state) {
  const auto t = random_table(2, state.range(0), 0.2, 1);
  const auto model = lacuna::fit_discrepancy_model(t, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lacuna::awpd(t.row(0), t.row(1), model));
  }
}
BENCHMARK(BM_awpd_pair)->Arg(8)->Arg(64)->Arg(512);

void BM_fit_model(benchmark::State& state) {
  const auto t = random_table(state.range(0), 16, 0.2, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lacuna::fit_discrepancy_model(t, 0.2));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_fit_model)->RangeMultiplier(2)->Range(128, 1024)->Complexity();

void BM_seed_kmeans_pp(benchmark::State& state) {
  const auto t = random_table(state.range(0), 8, 0.2, 3);
  const auto model = lacuna::fit_discrepancy_model(t, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lacuna::seed_kmeans_pp(t, 8, model, 5));
  }
}
BENCHMARK(BM_seed_kmeans_pp)->Arg(256)->Arg(1024);

void BM_seed_scalable(benchmark::State& state) {
  const auto t = random_table(state.range(0), 8, 0.2, 4);
  const auto model = lacuna::fit_discrepancy_model(t, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lacuna::seed_scalable(t, 8, 16.0, 5, model, 5));
  }
}
BENCHMARK(BM_seed_scalable)->Arg(256)->Arg(1024);

void BM_lloyd(benchmark::State& state) {
  const auto t = random_table(state.range(0), 8, 0.2, 5);
  const auto model = lacuna::fit_discrepancy_model(t, 0.2);
  const auto init = lacuna::seed_kmeans_pp(t, 8, model, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lacuna::lloyd_awpd(t, init, model, 50));
  }
}
BENCHMARK(BM_lloyd)->Arg(256)->Arg(1024);

void BM_knn_predict(benchmark::State& state) {
  const auto train_table = random_table(state.range(0), 8, 0.2, 6);
  lacuna::LabeledDataset train;
  train.table = train_table;
  for (std::size_t i = 0; i < train_table.rows(); ++i)
    train.labels.push_back(i % 2 ? "a" : "b");
  const auto test = random_table(32, 8, 0.2, 7);
  const auto model = lacuna::fit_discrepancy_model(train.table.concat(test), 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lacuna::knn_awpd_predict(train, test, 5, model, 3));
  }
}
BENCHMARK(BM_knn_predict)->Arg(256)->Arg(1024);

void BM_mcar(benchmark::State& state) {
  const auto t = random_table(state.range(0), 8, 0.0, 8);
  lacuna::MissingnessSpec spec;
  spec.target_fraction = 0.25;
  spec.seed = 11;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lacuna::apply_mcar(t, spec));
  }
}
BENCHMARK(BM_mcar)->Arg(1024)->Arg(8192);

void BM_hungarian(benchmark::State& state) {
  const std::size_t k = state.range(0);
  std::mt19937_64 eng(123);
  std::vector<std::vector<double>> cost(k, std::vector<double>(k));
  for (auto& row : cost)
    for (auto& cell : row) cell = static_cast<double>(eng() % 1000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lacuna::min_cost_assignment(cost));
  }
}
BENCHMARK(BM_hungarian)->Arg(8)->Arg(36)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
