#include "lacuna/classification.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "lacuna/random.hpp"

namespace lacuna {

namespace {

NeighborSet k_smallest(std::vector<std::pair<double, std::size_t>>& scored, std::size_t k) {
  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + take, scored.end());
  NeighborSet out;
  out.indices.reserve(take);
  out.discrepancies.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    out.discrepancies.push_back(scored[r].first);
    out.indices.push_back(scored[r].second);
  }
  return out;
}

std::string vote(const NeighborSet& neighbors, const std::vector<std::string>& labels,
                 rng::Engine& eng) {
  std::map<std::string, std::size_t> counts;
  for (std::size_t idx : neighbors.indices) ++counts[labels[idx]];
  std::size_t best = 0;
  for (const auto& [label, c] : counts) best = std::max(best, c);
  std::vector<std::string> tied;
  for (const auto& [label, c] : counts)
    if (c == best) tied.push_back(label);
  if (tied.size() == 1) return tied.front();
  return tied[rng::uniform_below(eng, tied.size())];
}

template <typename Score>
std::vector<std::string> predict_impl(const LabeledDataset& train, const ObservedTable& test,
                                      std::size_t k, std::uint64_t seed, Score&& score) {
  if (k < 1) throw std::invalid_argument("knn predict: k must be at least 1");
  if (train.rows() == 0) throw std::invalid_argument("knn predict: empty training set");
  if (train.labels.size() != train.rows())
    throw std::invalid_argument("knn predict: training labels do not cover the training set");
  if (test.cols() != train.table.cols())
    throw std::invalid_argument("knn predict: attribute counts differ");

  std::vector<std::string> predictions(test.rows());
  std::vector<std::pair<double, std::size_t>> scored(train.rows());
  for (std::size_t t = 0; t < test.rows(); ++t) {
    const auto p = test.row(t);
    for (std::size_t j = 0; j < train.rows(); ++j) scored[j] = {score(p, j), j};
    const NeighborSet neighbors = k_smallest(scored, k);
    auto eng = rng::make_engine(rng::mix(seed, t));
    predictions[t] = vote(neighbors, train.labels, eng);
  }
  return predictions;
}

}  // namespace

NeighborSet neighbor_set(const InstanceView& p, const ObservedTable& train, std::size_t k,
                         const DiscrepancyModel& model) {
  if (k < 1) throw std::invalid_argument("neighbor_set: k must be at least 1");
  if (train.rows() == 0) throw std::invalid_argument("neighbor_set: empty training set");
  std::vector<std::pair<double, std::size_t>> scored(train.rows());
  for (std::size_t j = 0; j < train.rows(); ++j) scored[j] = {awpd(p, train.row(j), model), j};
  return k_smallest(scored, k);
}

std::vector<std::string> knn_awpd_predict(const LabeledDataset& train, const ObservedTable& test,
                                          std::size_t k, const DiscrepancyModel& model,
                                          std::uint64_t seed) {
  return predict_impl(train, test, k, seed, [&](const InstanceView& p, std::size_t j) {
    return awpd(p, train.table.row(j), model);
  });
}

std::vector<std::string> knn_euclid_predict(const LabeledDataset& train, const ObservedTable& test,
                                            std::size_t k, std::uint64_t seed) {
  const std::size_t m = train.table.cols();
  if (train.table.observed_count() != train.rows() * m ||
      test.observed_count() != test.rows() * test.cols())
    throw std::invalid_argument("knn_euclid_predict: tables must be fully observed");
  return predict_impl(train, test, k, seed, [&](const InstanceView& p, std::size_t j) {
    const auto b = train.table.row(j);
    double d2 = 0.0;
    for (std::size_t l = 0; l < m; ++l) {
      const double d = p.values[l] - b.values[l];
      d2 += d * d;
    }
    return d2;  // ordering only; monotone in the distance
  });
}

}  // namespace lacuna
