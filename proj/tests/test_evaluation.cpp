#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "lacuna/evaluation.hpp"

using namespace lacuna;

namespace {

// Brute-force matching oracle: best one-to-one cluster-to-class assignment
// by enumerating all permutations of the padded square confusion matrix.
double brute_force_accuracy(const std::vector<std::vector<double>>& counts, double n) {
  const std::size_t k = counts.size();
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double total = 0.0;
    for (std::size_t r = 0; r < k; ++r) total += counts[r][perm[r]];
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / n;
}

// Builds partition/truth vectors realizing a clusters x classes confusion
// matrix of counts.
std::pair<std::vector<std::size_t>, std::vector<std::string>> realize(
    const std::vector<std::vector<std::size_t>>& confusion) {
  std::vector<std::size_t> partition;
  std::vector<std::string> truth;
  for (std::size_t r = 0; r < confusion.size(); ++r)
    for (std::size_t c = 0; c < confusion[r].size(); ++c)
      for (std::size_t rep = 0; rep < confusion[r][c]; ++rep) {
        partition.push_back(r);
        truth.push_back("class" + std::to_string(c));
      }
  return {partition, truth};
}

}  // namespace

TEST_CASE("clustering_accuracy basics") {
  const std::vector<std::string> truth{"a", "a", "b", "b", "c"};
  const std::vector<std::size_t> exact{0, 0, 1, 1, 2};
  CHECK(clustering_accuracy(exact, truth) == doctest::Approx(1.0));

  // any relabeling permutation still scores 1.0
  const std::vector<std::size_t> permuted{2, 2, 0, 0, 1};
  CHECK(clustering_accuracy(permuted, truth) == doctest::Approx(1.0));
}

TEST_CASE("clustering_accuracy on the worked confusion matrix") {
  // clusters x classes counts [[5,1],[2,4]] -> best match (5+4)/12
  const auto [partition, truth] = realize({{5, 1}, {2, 4}});
  CHECK(clustering_accuracy(partition, truth) == doctest::Approx(9.0 / 12.0));
}

TEST_CASE("clustering_accuracy handles rectangular confusion matrices") {
  // 3 clusters, 2 classes
  const auto [p1, t1] = realize({{4, 0}, {0, 3}, {2, 1}});
  CHECK(clustering_accuracy(p1, t1) == doctest::Approx(7.0 / 10.0));
  // 2 clusters, 3 classes
  const auto [p2, t2] = realize({{3, 1, 0}, {0, 1, 4}});
  CHECK(clustering_accuracy(p2, t2) == doctest::Approx(7.0 / 9.0));
}

TEST_CASE("clustering_accuracy matches brute force on random confusions") {
  std::mt19937_64 eng(77);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t clusters = 2 + eng() % 5;  // up to 6
    const std::size_t classes = 2 + eng() % 5;
    std::vector<std::vector<std::size_t>> confusion(clusters,
                                                    std::vector<std::size_t>(classes, 0));
    double n = 0.0;
    for (auto& row : confusion)
      for (auto& cell : row) {
        cell = eng() % 7;
        n += static_cast<double>(cell);
      }
    if (n == 0.0) continue;

    const std::size_t k = std::max(clusters, classes);
    std::vector<std::vector<double>> padded(k, std::vector<double>(k, 0.0));
    for (std::size_t r = 0; r < clusters; ++r)
      for (std::size_t c = 0; c < classes; ++c) padded[r][c] = static_cast<double>(confusion[r][c]);

    const auto [partition, truth] = realize(confusion);
    CHECK(clustering_accuracy(partition, truth) ==
          doctest::Approx(brute_force_accuracy(padded, n)).epsilon(1e-12));
  }
}

TEST_CASE("clustering_accuracy beats or equals the identity assignment") {
  const auto [partition, truth] = realize({{5, 1, 0}, {2, 4, 1}, {1, 0, 6}});
  const double identity = (5.0 + 4.0 + 6.0) / 20.0;
  CHECK(clustering_accuracy(partition, truth) >= identity);
}

TEST_CASE("clustering_accuracy validates input") {
  CHECK_THROWS_AS(clustering_accuracy({0, 1}, {"a"}), std::invalid_argument);
  CHECK_THROWS_AS(clustering_accuracy({}, {}), std::invalid_argument);
}

TEST_CASE("classification_accuracy") {
  CHECK(classification_accuracy({"a", "b"}, {"a", "b"}) == doctest::Approx(1.0));
  CHECK(classification_accuracy({"a", "b"}, {"b", "a"}) == doctest::Approx(0.0));
  CHECK(classification_accuracy({"a", "b", "c", "d"}, {"a", "b", "c", "x"}) ==
        doctest::Approx(0.75));
  CHECK_THROWS_AS(classification_accuracy({"a"}, {}), std::invalid_argument);
}

TEST_CASE("aggregate_runs computes mean and sample std per group") {
  std::vector<RunRecord> records;
  records.push_back({"iris", "mcar", 0.25, "kmpp-awpd", 1, 0.7});
  records.push_back({"iris", "mcar", 0.25, "kmpp-awpd", 2, 0.9});
  records.push_back({"iris", "mcar", 0.25, "zi", 1, 0.8});

  const auto rows = aggregate_runs(records);
  REQUIRE(rows.size() == 2);
  const auto& kmpp = rows[0].method == "kmpp-awpd" ? rows[0] : rows[1];
  const auto& zi = rows[0].method == "kmpp-awpd" ? rows[1] : rows[0];
  CHECK(kmpp.runs == 2);
  CHECK(kmpp.mean == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(kmpp.stddev == doctest::Approx(std::sqrt(0.02)).epsilon(1e-9));  // 0.1414
  CHECK(zi.runs == 1);
  CHECK(zi.stddev == 0.0);
  // both methods share the row group with equal means -> both flagged best
  CHECK(kmpp.best);
  CHECK(zi.best);
}

TEST_CASE("aggregate_runs never mixes mechanisms and is order-independent") {
  std::vector<RunRecord> records;
  records.push_back({"iris", "mcar", 0.25, "m1", 1, 0.5});
  records.push_back({"iris", "mar", 0.25, "m1", 1, 0.9});
  records.push_back({"glass", "mcar", 0.25, "m1", 1, 0.4});
  records.push_back({"iris", "mcar", 0.1, "m1", 1, 0.6});

  auto rows = aggregate_runs(records);
  REQUIRE(rows.size() == 4);  // four distinct groups

  std::reverse(records.begin(), records.end());
  const auto rows2 = aggregate_runs(records);
  REQUIRE(rows2.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].dataset == rows2[i].dataset);
    CHECK(rows[i].mechanism == rows2[i].mechanism);
    CHECK(rows[i].fraction == rows2[i].fraction);
    CHECK(rows[i].method == rows2[i].method);
    CHECK(rows[i].mean == rows2[i].mean);
  }
}

TEST_CASE("aggregate_runs flags the best method per row group") {
  std::vector<RunRecord> records;
  records.push_back({"iris", "mcar", 0.25, "good", 1, 0.9});
  records.push_back({"iris", "mcar", 0.25, "bad", 1, 0.5});
  const auto rows = aggregate_runs(records);
  for (const auto& row : rows) CHECK(row.best == (row.method == "good"));
}

TEST_CASE("aggregate_runs rejects empty input") {
  CHECK_THROWS_AS(aggregate_runs({}), std::invalid_argument);
}
