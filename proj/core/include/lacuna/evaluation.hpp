#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace lacuna {

/// One (dataset, mechanism, fraction, method, seed) accuracy observation.
struct RunRecord {
  std::string dataset;
  std::string mechanism;
  double fraction = 0.0;
  std::string method;
  std::uint64_t seed = 0;
  double accuracy = 0.0;  // in [0,1]
};

/// mean +/- std aggregate of the records sharing one
/// (dataset, mechanism, fraction, method) key.
struct AggregateRow {
  std::string dataset;
  std::string mechanism;
  double fraction = 0.0;
  std::string method;
  std::size_t runs = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample std (n-1); 0 for a single record
  bool best = false;    // highest mean among methods of the same row group
};

/// Minimum-cost assignment on a square cost matrix (Hungarian algorithm);
/// returns the column matched to each row.
std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<double>>& cost);

/// Fraction of instances correctly matched under the best one-to-one
/// assignment of clusters to classes. Confusion matrices that are not
/// square are zero-padded before matching. Invariant under permutations of
/// cluster ids and of class labels.
double clustering_accuracy(const std::vector<std::size_t>& partition,
                           const std::vector<std::string>& truth);

/// Fraction of exact matches.
double classification_accuracy(const std::vector<std::string>& predicted,
                               const std::vector<std::string>& truth);

/// Groups records by (dataset, mechanism, fraction, method), computes
/// mean +/- sample std, orders groups deterministically, and flags the
/// best method(s) within each (dataset, mechanism, fraction) row.
std::vector<AggregateRow> aggregate_runs(const std::vector<RunRecord>& records);

}  // namespace lacuna
