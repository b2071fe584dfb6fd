#include "lacuna/imputation.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "lacuna/discrepancy.hpp"

namespace lacuna {

namespace {

ObservedTable complete_from(const ObservedTable& table, std::vector<double> values) {
  return ObservedTable::complete(table.rows(), table.cols(), std::move(values),
                                 table.attribute_names());
}

std::vector<double> attribute_means(const ObservedTable& table, const char* op) {
  const std::size_t n = table.rows(), m = table.cols();
  std::vector<double> mean(m, 0.0);
  for (std::size_t l = 0; l < m; ++l) {
    double sum = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (table.observed(i, l)) {
        sum += table.value(i, l);
        ++cnt;
      }
    if (cnt == 0)
      throw std::invalid_argument(std::string(op) + ": attribute " + std::to_string(l) +
                                  " is observed nowhere");
    mean[l] = sum / static_cast<double>(cnt);
  }
  return mean;
}

}  // namespace

ObservedTable impute_zero(const ObservedTable& table) {
  const std::size_t n = table.rows(), m = table.cols();
  std::vector<double> values = table.raw_values();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < m; ++l)
      if (!table.observed(i, l)) values[i * m + l] = 0.0;
  return complete_from(table, std::move(values));
}

ObservedTable impute_mean(const ObservedTable& table) {
  const std::size_t n = table.rows(), m = table.cols();
  const auto mean = attribute_means(table, "impute_mean");
  std::vector<double> values = table.raw_values();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < m; ++l)
      if (!table.observed(i, l)) values[i * m + l] = mean[l];
  return complete_from(table, std::move(values));
}

ObservedTable impute_knn(const ObservedTable& table, std::size_t k) {
  if (k < 1) throw std::invalid_argument("impute_knn: k must be at least 1");
  const std::size_t n = table.rows(), m = table.cols();
  const auto mean = attribute_means(table, "impute_knn");
  std::vector<double> values = table.raw_values();

  // Observers of each attribute, by row index.
  std::vector<std::vector<std::size_t>> observers(m);
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t i = 0; i < n; ++i)
      if (table.observed(i, l)) observers[l].push_back(i);

  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < n; ++i) {
    const auto vi = table.row(i);
    for (std::size_t l = 0; l < m; ++l) {
      if (table.observed(i, l)) continue;
      ranked.clear();
      for (std::size_t j : observers[l])
        ranked.emplace_back(observed_distance(vi, table.row(j)), j);
      if (ranked.empty()) {
        values[i * m + l] = mean[l];  // unreachable given the means check above
        continue;
      }
      const std::size_t take = std::min(k, ranked.size());
      std::partial_sort(ranked.begin(), ranked.begin() + take, ranked.end());
      double sum = 0.0;
      for (std::size_t r = 0; r < take; ++r) sum += table.value(ranked[r].second, l);
      values[i * m + l] = sum / static_cast<double>(take);
    }
  }
  return complete_from(table, std::move(values));
}

}  // namespace lacuna
