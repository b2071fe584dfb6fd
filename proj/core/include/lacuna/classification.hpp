#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lacuna/dataset.hpp"
#include "lacuna/discrepancy.hpp"

namespace lacuna {

/// The k nearest training rows of one query point, discrepancies ascending.
struct NeighborSet {
  std::vector<std::size_t> indices;
  std::vector<double> discrepancies;
};

/// Brute-force scan for the min(k, n_train) training instances with the
/// smallest AWPD to `p`; ties at the boundary break toward the lower row
/// index. The model is expected to be fitted on train and test together.
NeighborSet neighbor_set(const InstanceView& p, const ObservedTable& train, std::size_t k,
                         const DiscrepancyModel& model);

/// Majority vote over each test instance's NeighborSet. Ties among maximal
/// labels are resolved uniformly at random; every test instance consumes its
/// own sub-stream of `seed`, so predictions are independent of evaluation
/// order.
std::vector<std::string> knn_awpd_predict(const LabeledDataset& train, const ObservedTable& test,
                                          std::size_t k, const DiscrepancyModel& model,
                                          std::uint64_t seed);

/// Euclidean kNN with the same voting and tie rules; both tables must be
/// fully observed. Baseline for imputed data.
std::vector<std::string> knn_euclid_predict(const LabeledDataset& train, const ObservedTable& test,
                                            std::size_t k, std::uint64_t seed);

}  // namespace lacuna
