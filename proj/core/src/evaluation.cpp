#include "lacuna/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

namespace lacuna {

// Hungarian algorithm with potentials and shortest augmenting paths,
// O(K^3). cost must be square.
std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t k = cost.size();
  for (const auto& row : cost)
    if (row.size() != k) throw std::invalid_argument("min_cost_assignment: matrix must be square");
  if (k == 0) return {};

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based internals; row/column 0 are sentinels.
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
  std::vector<std::size_t> match(k + 1, 0);  // match[col] = row
  std::vector<std::size_t> way(k + 1, 0);

  for (std::size_t i = 1; i <= k; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(k + 1, kInf);
    std::vector<char> used(k + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= k; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> assignment(k);
  for (std::size_t j = 1; j <= k; ++j) assignment[match[j] - 1] = j - 1;
  return assignment;
}

double clustering_accuracy(const std::vector<std::size_t>& partition,
                           const std::vector<std::string>& truth) {
  if (partition.size() != truth.size())
    throw std::invalid_argument("clustering_accuracy: length mismatch");
  const std::size_t n = partition.size();
  if (n == 0) throw std::invalid_argument("clustering_accuracy: empty input");

  std::size_t n_clusters = 0;
  for (std::size_t c : partition) n_clusters = std::max(n_clusters, c + 1);

  std::map<std::string, std::size_t> class_id;
  for (const auto& label : truth) class_id.emplace(label, class_id.size());
  const std::size_t n_classes = class_id.size();

  const std::size_t k = std::max(n_clusters, n_classes);
  std::vector<std::vector<double>> counts(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < n; ++i) counts[partition[i]][class_id.at(truth[i])] += 1.0;

  // Maximize matched count == minimize negated counts.
  std::vector<std::vector<double>> cost(k, std::vector<double>(k, 0.0));
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c) cost[r][c] = -counts[r][c];
  const auto assignment = min_cost_assignment(cost);

  double matched = 0.0;
  for (std::size_t r = 0; r < k; ++r) matched += counts[r][assignment[r]];
  return matched / static_cast<double>(n);
}

double classification_accuracy(const std::vector<std::string>& predicted,
                               const std::vector<std::string>& truth) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("classification_accuracy: length mismatch");
  if (predicted.empty()) throw std::invalid_argument("classification_accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == truth[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

std::vector<AggregateRow> aggregate_runs(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate_runs: no records");

  using Key = std::tuple<std::string, std::string, double, std::string>;
  std::map<Key, std::vector<double>> groups;
  for (const auto& r : records)
    groups[{r.dataset, r.mechanism, r.fraction, r.method}].push_back(r.accuracy);

  std::vector<AggregateRow> rows;
  rows.reserve(groups.size());
  for (const auto& [key, values] : groups) {
    AggregateRow row;
    std::tie(row.dataset, row.mechanism, row.fraction, row.method) = key;
    row.runs = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    row.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - row.mean) * (v - row.mean);
    row.stddev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    rows.push_back(std::move(row));
  }

  // Flag the best mean within each (dataset, mechanism, fraction) row group.
  for (auto it = rows.begin(); it != rows.end();) {
    auto group_end = it;
    double best_mean = -1.0;
    while (group_end != rows.end() && group_end->dataset == it->dataset &&
           group_end->mechanism == it->mechanism && group_end->fraction == it->fraction) {
      best_mean = std::max(best_mean, group_end->mean);
      ++group_end;
    }
    for (auto g = it; g != group_end; ++g) g->best = (g->mean == best_mean);
    it = group_end;
  }
  return rows;
}

}  // namespace lacuna
