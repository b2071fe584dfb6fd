#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lacuna/dataset.hpp"

namespace lacuna {

/// Fitted parameters of the attribute weighted penalty based discrepancy:
/// per-attribute penalty weights, the distance/penalty blend beta, and the
/// normalizer d_max. Immutable after construction; all queries are pure.
class DiscrepancyModel {
 public:
  /// Validates beta in (0,1), d_max > 0, non-negative weights with a
  /// positive sum.
  DiscrepancyModel(std::vector<double> weights, double beta, double d_max);

  const std::vector<double>& weights() const { return weights_; }
  double beta() const { return beta_; }
  double d_max() const { return d_max_; }
  double weight_sum() const { return weight_sum_; }
  std::size_t attribute_count() const { return weights_.size(); }

 private:
  std::vector<double> weights_;
  double beta_;
  double d_max_;
  double weight_sum_;
};

/// Euclidean distance restricted to the attributes observed in both views;
/// 0 when no attribute is shared.
double observed_distance(const InstanceView& a, const InstanceView& b);

/// Fraction of attributes unobserved in at least one of the two views,
/// |P \ (gamma_a n gamma_b)| / m.
double missing_fraction(const InstanceView& a, const InstanceView& b);

/// observed_distance + missing_fraction. Illustrative measure only.
double pdm(const InstanceView& a, const InstanceView& b);

/// sqrt(observed_distance^2 + missing_fraction). Illustrative measure only.
double sdm(const InstanceView& a, const InstanceView& b);

/// Weighted share of attributes unobserved in at least one view:
/// sum of weights over P \ (gamma_a n gamma_b), divided by the weight sum.
/// Always in [0, 1].
double penalty(const InstanceView& a, const InstanceView& b, const DiscrepancyModel& model);

/// The blended discrepancy
///   delta(a,b) = (1 - beta) * observed_distance(a,b) / d_max + beta * penalty(a,b).
/// For pairs drawn from the fitted table the value never exceeds 1. For
/// out-of-table queries the distance ratio may exceed 1; it is not clamped.
double awpd(const InstanceView& a, const InstanceView& b, const DiscrepancyModel& model);

/// Fits weights w_l = |A_l| / n (fraction of instances observing attribute l)
/// and d_max = max pairwise observed_distance over the table (1 when that
/// maximum is 0). Requires n >= 2 and beta in (0,1).
DiscrepancyModel fit_discrepancy_model(const ObservedTable& table, double beta);

/// Default blend: the table's missing-cell fraction clamped to [0.1, 0.25].
double default_beta(const ObservedTable& table);

/// Text round-trip with 17 significant digits (bit-faithful).
void save_model(const DiscrepancyModel& model, const std::string& path);
DiscrepancyModel load_model(const std::string& path);

/// Optional precomputed n x n matrix of awpd values for one table.
/// O(n^2) memory; symmetric, zero-diagonal-free (delta(a,a) can be > 0 for
/// rows with unobserved attributes).
class DiscrepancyCache {
 public:
  DiscrepancyCache(const ObservedTable& table, const DiscrepancyModel& model);

  double at(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::vector<double> values_;
};

}  // namespace lacuna
