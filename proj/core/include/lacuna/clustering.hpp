#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "lacuna/dataset.hpp"
#include "lacuna/discrepancy.hpp"

namespace lacuna {

/// Cluster centroid: attribute values plus the set of attributes for which
/// the centroid currently has a value. Seeded centroids copy a data
/// instance, so the defined set starts as that instance's observed set and
/// only ever grows across iterations.
struct Centroid {
  std::vector<double> values;
  std::vector<std::uint8_t> defined;

  InstanceView view() const { return {values, defined}; }

  /// Centroid copied from a data instance.
  static Centroid from_instance(const InstanceView& v);
};

/// Result of the alternating optimization.
struct ClusterState {
  std::vector<Centroid> centroids;
  std::vector<std::size_t> membership;   // one cluster index per instance
  std::size_t iterations = 0;
  std::vector<double> objective_trace;   // objective after each iteration
  bool converged = false;                // membership stopped changing before the cap
};

inline constexpr std::size_t kDefaultMaxIter = 100;

/// AWPD between an instance and a centroid, with the centroid's defined set
/// playing the role of its observed set.
double point_centroid_discrepancy(const InstanceView& a, const Centroid& z,
                                  const DiscrepancyModel& model);

/// Sum of point_centroid_discrepancy over all instances and their assigned
/// centroids.
double objective(const ObservedTable& table, const ClusterState& state,
                 const DiscrepancyModel& model);

/// D^2-weighted seeding: the first centroid is a uniformly chosen instance,
/// each next one is drawn with probability proportional to the squared AWPD
/// to its nearest already-chosen centroid. Chosen instances are distinct.
std::vector<Centroid> seed_kmeans_pp(const ObservedTable& table, std::size_t k,
                                     const DiscrepancyModel& model, std::uint64_t seed);

/// Oversampled multi-round seeding: for `rounds` rounds every instance joins
/// the candidate set independently with probability min(1, oversample *
/// delta^2 / phi); candidates are then weighted by how many instances they
/// are nearest to and reduced to k by weighted D^2 seeding. Candidate
/// shortfalls are topped up with uniform draws. Defaults: oversample = 2k,
/// rounds = 5.
std::vector<Centroid> seed_scalable(const ObservedTable& table, std::size_t k, double oversample,
                                    std::size_t rounds, const DiscrepancyModel& model,
                                    std::uint64_t seed);

/// Called after every assignment step with the centroids the assignment was
/// made against.
using LloydObserver = std::function<void(std::size_t iteration, const std::vector<Centroid>&,
                                         const std::vector<std::size_t>& membership)>;

/// Alternating optimization under AWPD. Each pass updates centroids from the
/// current membership (attribute-wise mean over the members observing the
/// attribute, previous value retained where no member observes it, whole
/// centroid retained for empty clusters), then reassigns every instance to
/// its nearest centroid with ties to the lowest cluster index. Stops when
/// membership is unchanged or after max_iter passes. The algorithm is
/// deterministic; `seed` is accepted for interface stability and never
/// drawn from.
ClusterState lloyd_awpd(const ObservedTable& table, std::vector<Centroid> init,
                        const DiscrepancyModel& model, std::size_t max_iter = kDefaultMaxIter,
                        std::uint64_t seed = 0, const LloydObserver& observer = nullptr);

/// Plain Euclidean k-means with D^2 seeding, implemented independently of
/// the AWPD path. Requires a fully observed table. The objective trace is
/// the within-cluster sum of squared distances.
struct EuclidKmeansResult {
  std::vector<std::vector<double>> centroids;
  std::vector<std::size_t> membership;
  std::size_t iterations = 0;
  std::vector<double> objective_trace;
  bool converged = false;
};

using EuclidObserver = std::function<void(std::size_t iteration,
                                          const std::vector<std::vector<double>>& centroids,
                                          const std::vector<std::size_t>& membership)>;

EuclidKmeansResult kmeans_euclid(const ObservedTable& table, std::size_t k,
                                 std::size_t max_iter = kDefaultMaxIter, std::uint64_t seed = 0,
                                 const EuclidObserver& observer = nullptr);

}  // namespace lacuna
