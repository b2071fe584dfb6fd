#include "lacuna/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lacuna/random.hpp"

namespace lacuna {

namespace {

// Inverse-CDF walk over weights, skipping already-chosen indices. Falls back
// to a uniform pick among the unchosen when the eligible weights sum to 0.
std::size_t weighted_pick(const std::vector<double>& weights, const std::vector<char>& chosen,
                          rng::Engine& eng) {
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (!chosen[i]) total += weights[i];
  if (total > 0.0) {
    const double u = rng::uniform01(eng) * total;
    double acc = 0.0;
    std::size_t last = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (chosen[i]) continue;
      acc += weights[i];
      last = i;
      if (u < acc) return i;
    }
    if (last < weights.size()) return last;  // u landed on the rounding edge
  }
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (!chosen[i]) open.push_back(i);
  if (open.empty()) throw std::logic_error("weighted_pick: no unchosen index left");
  return open[rng::uniform_below(eng, open.size())];
}

void check_k(std::size_t k, std::size_t n, const char* op) {
  if (k < 1 || k > n)
    throw std::invalid_argument(std::string(op) + ": k must lie in [1, n]");
}

}  // namespace

Centroid Centroid::from_instance(const InstanceView& v) {
  Centroid z;
  z.values.assign(v.values.begin(), v.values.end());
  z.defined.assign(v.mask.begin(), v.mask.end());
  return z;
}

double point_centroid_discrepancy(const InstanceView& a, const Centroid& z,
                                  const DiscrepancyModel& model) {
  return awpd(a, z.view(), model);
}

double objective(const ObservedTable& table, const ClusterState& state,
                 const DiscrepancyModel& model) {
  if (state.membership.size() != table.rows())
    throw std::invalid_argument("objective: membership size does not match table");
  double sum = 0.0;
  for (std::size_t i = 0; i < table.rows(); ++i)
    sum += point_centroid_discrepancy(table.row(i), state.centroids[state.membership[i]], model);
  return sum;
}

std::vector<Centroid> seed_kmeans_pp(const ObservedTable& table, std::size_t k,
                                     const DiscrepancyModel& model, std::uint64_t seed) {
  const std::size_t n = table.rows();
  check_k(k, n, "seed_kmeans_pp");
  auto eng = rng::make_engine(seed);

  std::vector<std::size_t> picks;
  picks.reserve(k);
  std::vector<char> chosen(n, 0);
  std::vector<double> min_d2(n, 0.0);

  const auto first = static_cast<std::size_t>(rng::uniform_below(eng, n));
  picks.push_back(first);
  chosen[first] = 1;
  for (std::size_t i = 0; i < n; ++i)
    if (!chosen[i]) {
      const double d = awpd(table.row(i), table.row(first), model);
      min_d2[i] = d * d;
    }

  while (picks.size() < k) {
    const std::size_t next = weighted_pick(min_d2, chosen, eng);
    picks.push_back(next);
    chosen[next] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      const double d = awpd(table.row(i), table.row(next), model);
      min_d2[i] = std::min(min_d2[i], d * d);
    }
  }

  std::vector<Centroid> centroids;
  centroids.reserve(k);
  for (std::size_t p : picks) centroids.push_back(Centroid::from_instance(table.row(p)));
  return centroids;
}

std::vector<Centroid> seed_scalable(const ObservedTable& table, std::size_t k, double oversample,
                                    std::size_t rounds, const DiscrepancyModel& model,
                                    std::uint64_t seed) {
  const std::size_t n = table.rows();
  check_k(k, n, "seed_scalable");
  if (!(oversample > 0.0)) throw std::invalid_argument("seed_scalable: oversample must be positive");
  if (rounds < 1) throw std::invalid_argument("seed_scalable: rounds must be at least 1");
  auto eng = rng::make_engine(seed);

  std::vector<std::size_t> candidates;
  std::vector<char> is_candidate(n, 0);
  std::vector<double> min_d2(n, 0.0);  // squared AWPD to nearest candidate

  const auto first = static_cast<std::size_t>(rng::uniform_below(eng, n));
  candidates.push_back(first);
  is_candidate[first] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = awpd(table.row(i), table.row(first), model);
    min_d2[i] = d * d;
  }

  for (std::size_t round = 0; round < rounds; ++round) {
    const double phi = std::accumulate(min_d2.begin(), min_d2.end(), 0.0);
    if (phi <= 0.0) break;  // every instance coincides with a candidate
    std::vector<std::size_t> batch;
    for (std::size_t i = 0; i < n; ++i) {
      if (is_candidate[i]) continue;
      const double p = std::min(1.0, oversample * min_d2[i] / phi);
      if (rng::uniform01(eng) < p) batch.push_back(i);
    }
    for (std::size_t b : batch) {
      candidates.push_back(b);
      is_candidate[b] = 1;
    }
    for (std::size_t b : batch) {
      const auto vb = table.row(b);
      for (std::size_t i = 0; i < n; ++i) {
        const double d = awpd(table.row(i), vb, model);
        min_d2[i] = std::min(min_d2[i], d * d);
      }
    }
  }

  // Top up with uniform draws when the rounds produced fewer than k.
  while (candidates.size() < k) {
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < n; ++i)
      if (!is_candidate[i]) open.push_back(i);
    const std::size_t pick = open[rng::uniform_below(eng, open.size())];
    candidates.push_back(pick);
    is_candidate[pick] = 1;
  }
  std::sort(candidates.begin(), candidates.end());

  // Weight candidates by the number of instances nearest to them, ties to
  // the lowest candidate row index.
  const std::size_t c = candidates.size();
  std::vector<double> weight(c, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto vi = table.row(i);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c; ++j) {
      const double d = awpd(vi, table.row(candidates[j]), model);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    weight[best] += 1.0;
  }

  // Reduce to k by weighted D^2 seeding over the candidate set.
  std::vector<char> chosen(c, 0);
  std::vector<std::size_t> picks;
  picks.reserve(k);
  const std::size_t lead = weighted_pick(weight, chosen, eng);
  picks.push_back(lead);
  chosen[lead] = 1;
  std::vector<double> cand_d2(c, 0.0);
  for (std::size_t j = 0; j < c; ++j)
    if (!chosen[j]) {
      const double d = awpd(table.row(candidates[j]), table.row(candidates[lead]), model);
      cand_d2[j] = d * d;
    }
  while (picks.size() < k) {
    std::vector<double> w(c, 0.0);
    for (std::size_t j = 0; j < c; ++j)
      if (!chosen[j]) w[j] = weight[j] * cand_d2[j];
    const std::size_t next = weighted_pick(w, chosen, eng);
    picks.push_back(next);
    chosen[next] = 1;
    for (std::size_t j = 0; j < c; ++j) {
      if (chosen[j]) continue;
      const double d = awpd(table.row(candidates[j]), table.row(candidates[next]), model);
      cand_d2[j] = std::min(cand_d2[j], d * d);
    }
  }

  std::vector<Centroid> centroids;
  centroids.reserve(k);
  for (std::size_t p : picks) centroids.push_back(Centroid::from_instance(table.row(candidates[p])));
  return centroids;
}

namespace {

std::vector<std::size_t> assign_awpd(const ObservedTable& table,
                                     const std::vector<Centroid>& centroids,
                                     const DiscrepancyModel& model) {
  std::vector<std::size_t> membership(table.rows(), 0);
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const auto vi = table.row(i);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centroids.size(); ++j) {
      const double d = point_centroid_discrepancy(vi, centroids[j], model);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    membership[i] = best;
  }
  return membership;
}

// Attribute-wise mean over members observing the attribute; previous value
// retained where no member observes it; empty clusters keep their centroid.
void update_awpd(const ObservedTable& table, const std::vector<std::size_t>& membership,
                 std::vector<Centroid>& centroids) {
  const std::size_t m = table.cols(), k = centroids.size();
  std::vector<std::vector<double>> sum(k, std::vector<double>(m, 0.0));
  std::vector<std::vector<std::size_t>> cnt(k, std::vector<std::size_t>(m, 0));
  std::vector<std::size_t> members(k, 0);

  for (std::size_t i = 0; i < table.rows(); ++i) {
    const std::size_t j = membership[i];
    ++members[j];
    const auto vi = table.row(i);
    for (std::size_t l = 0; l < m; ++l) {
      if (vi.observed(l)) {
        sum[j][l] += vi.values[l];
        ++cnt[j][l];
      }
    }
  }

  for (std::size_t j = 0; j < k; ++j) {
    if (members[j] == 0) continue;
    for (std::size_t l = 0; l < m; ++l) {
      if (cnt[j][l] > 0) {
        centroids[j].values[l] = sum[j][l] / static_cast<double>(cnt[j][l]);
        centroids[j].defined[l] = 1;
      }
      // cnt == 0: previous value (defined or not) stays as is.
    }
  }
}

double objective_of(const ObservedTable& table, const std::vector<std::size_t>& membership,
                    const std::vector<Centroid>& centroids, const DiscrepancyModel& model) {
  double sum = 0.0;
  for (std::size_t i = 0; i < table.rows(); ++i)
    sum += point_centroid_discrepancy(table.row(i), centroids[membership[i]], model);
  return sum;
}

}  // namespace

ClusterState lloyd_awpd(const ObservedTable& table, std::vector<Centroid> init,
                        const DiscrepancyModel& model, std::size_t max_iter, std::uint64_t seed,
                        const LloydObserver& observer) {
  (void)seed;
  if (init.empty()) throw std::invalid_argument("lloyd_awpd: need at least one centroid");
  if (max_iter < 1) throw std::invalid_argument("lloyd_awpd: max_iter must be at least 1");
  for (const auto& z : init)
    if (z.values.size() != table.cols() || z.defined.size() != table.cols())
      throw std::invalid_argument("lloyd_awpd: centroid width does not match table");

  ClusterState state;
  state.centroids = std::move(init);
  state.membership = assign_awpd(table, state.centroids, model);
  if (observer) observer(0, state.centroids, state.membership);

  while (state.iterations < max_iter) {
    ++state.iterations;
    update_awpd(table, state.membership, state.centroids);
    auto next = assign_awpd(table, state.centroids, model);
    if (observer) observer(state.iterations, state.centroids, next);
    state.objective_trace.push_back(objective_of(table, next, state.centroids, model));
    const bool same = (next == state.membership);
    state.membership = std::move(next);
    if (same) {
      state.converged = true;
      break;
    }
  }
  if (!state.converged) {
    // Final centroid recomputation for the membership produced by the last
    // assignment pass.
    update_awpd(table, state.membership, state.centroids);
  }
  return state;
}

namespace {

std::vector<std::size_t> assign_euclid(const ObservedTable& table,
                                       const std::vector<std::vector<double>>& centroids) {
  const std::size_t m = table.cols();
  std::vector<std::size_t> membership(table.rows(), 0);
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const auto vi = table.row(i);
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centroids.size(); ++j) {
      double d2 = 0.0;
      for (std::size_t l = 0; l < m; ++l) {
        const double d = vi.values[l] - centroids[j][l];
        d2 += d * d;
      }
      if (d2 < best_d2) {
        best_d2 = d2;
        best = j;
      }
    }
    membership[i] = best;
  }
  return membership;
}

void update_euclid(const ObservedTable& table, const std::vector<std::size_t>& membership,
                   std::vector<std::vector<double>>& centroids) {
  const std::size_t m = table.cols(), k = centroids.size();
  std::vector<std::vector<double>> sum(k, std::vector<double>(m, 0.0));
  std::vector<std::size_t> members(k, 0);
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const std::size_t j = membership[i];
    ++members[j];
    const auto vi = table.row(i);
    for (std::size_t l = 0; l < m; ++l) sum[j][l] += vi.values[l];
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (members[j] == 0) continue;  // empty cluster keeps its centroid
    for (std::size_t l = 0; l < m; ++l)
      centroids[j][l] = sum[j][l] / static_cast<double>(members[j]);
  }
}

double sse_euclid(const ObservedTable& table, const std::vector<std::size_t>& membership,
                  const std::vector<std::vector<double>>& centroids) {
  double sse = 0.0;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const auto vi = table.row(i);
    const auto& z = centroids[membership[i]];
    for (std::size_t l = 0; l < table.cols(); ++l) {
      const double d = vi.values[l] - z[l];
      sse += d * d;
    }
  }
  return sse;
}

}  // namespace

EuclidKmeansResult kmeans_euclid(const ObservedTable& table, std::size_t k, std::size_t max_iter,
                                 std::uint64_t seed, const EuclidObserver& observer) {
  const std::size_t n = table.rows(), m = table.cols();
  check_k(k, n, "kmeans_euclid");
  if (max_iter < 1) throw std::invalid_argument("kmeans_euclid: max_iter must be at least 1");
  if (table.observed_count() != n * m)
    throw std::invalid_argument("kmeans_euclid: table must be fully observed");

  auto eng = rng::make_engine(seed);
  auto sq_dist = [&](std::size_t i, std::size_t j) {
    const auto a = table.row(i), b = table.row(j);
    double d2 = 0.0;
    for (std::size_t l = 0; l < m; ++l) {
      const double d = a.values[l] - b.values[l];
      d2 += d * d;
    }
    return d2;
  };

  // D^2 seeding.
  std::vector<std::size_t> picks;
  std::vector<char> chosen(n, 0);
  std::vector<double> min_d2(n, 0.0);
  const auto first = static_cast<std::size_t>(rng::uniform_below(eng, n));
  picks.push_back(first);
  chosen[first] = 1;
  for (std::size_t i = 0; i < n; ++i)
    if (!chosen[i]) min_d2[i] = sq_dist(i, first);
  while (picks.size() < k) {
    const std::size_t next = weighted_pick(min_d2, chosen, eng);
    picks.push_back(next);
    chosen[next] = 1;
    for (std::size_t i = 0; i < n; ++i)
      if (!chosen[i]) min_d2[i] = std::min(min_d2[i], sq_dist(i, next));
  }

  EuclidKmeansResult result;
  result.centroids.reserve(k);
  for (std::size_t p : picks) {
    const auto v = table.row(p);
    result.centroids.emplace_back(v.values.begin(), v.values.end());
  }

  result.membership = assign_euclid(table, result.centroids);
  if (observer) observer(0, result.centroids, result.membership);
  while (result.iterations < max_iter) {
    ++result.iterations;
    update_euclid(table, result.membership, result.centroids);
    auto next = assign_euclid(table, result.centroids);
    if (observer) observer(result.iterations, result.centroids, next);
    result.objective_trace.push_back(sse_euclid(table, next, result.centroids));
    const bool same = (next == result.membership);
    result.membership = std::move(next);
    if (same) {
      result.converged = true;
      break;
    }
  }
  if (!result.converged) update_euclid(table, result.membership, result.centroids);
  return result;
}

}  // namespace lacuna
