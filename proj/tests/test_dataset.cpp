#include <stdexcept>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "lacuna/dataset.hpp"
#include "support/synthetic.hpp"

using namespace lacuna;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path);
  out << content;
  return path;
}

// Independent mean/std over the observed entries of one column.
std::pair<double, double> column_stats(const ObservedTable& t, std::size_t l) {
  double sum = 0.0;
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < t.rows(); ++i)
    if (t.observed(i, l)) {
      sum += t.value(i, l);
      ++cnt;
    }
  const double mean = sum / static_cast<double>(cnt);
  double ss = 0.0;
  for (std::size_t i = 0; i < t.rows(); ++i)
    if (t.observed(i, l)) ss += (t.value(i, l) - mean) * (t.value(i, l) - mean);
  const double sd = cnt > 1 ? std::sqrt(ss / static_cast<double>(cnt - 1)) : 0.0;
  return {mean, sd};
}

}  // namespace

TEST_CASE("load_csv parses a complete labeled table") {
  const auto path = write_temp("lacuna_complete.csv", "x,y,label\n1,5,a\n2,3,b\n3,6,a\n");
  const auto data = load_csv(path);
  CHECK(data.table.rows() == 3);
  CHECK(data.table.cols() == 2);
  CHECK(data.table.observed_count() == 6);
  CHECK(data.table.value(0, 0) == 1.0);
  CHECK(data.table.value(2, 1) == 6.0);
  CHECK(data.labels == std::vector<std::string>{"a", "b", "a"});
  CHECK(data.label_name == "label");
  CHECK(data.class_count() == 2);
}

TEST_CASE("load_csv masks missing markers") {
  const auto path = write_temp("lacuna_missing.csv", "x,y,label\n?,5,a\n2,3,b\n3,6,a\n");
  const auto data = load_csv(path);
  CHECK_FALSE(data.table.observed(0, 0));
  CHECK(data.table.observed(0, 1));
  CHECK(data.table.observed_count() == 5);

  SUBCASE("markers are case-insensitive") {
    const auto p2 = write_temp("lacuna_markers.csv", "x,y,label\nna,5,a\n2,NAN,b\n,6,a\n");
    const auto d2 = load_csv(p2);
    CHECK_FALSE(d2.table.observed(0, 0));
    CHECK_FALSE(d2.table.observed(1, 1));
    CHECK_FALSE(d2.table.observed(2, 0));
  }
}

TEST_CASE("load_csv loads iris") {
  const auto data = load_csv(std::string(LACUNA_DATA_DIR) + "/iris.csv");
  CHECK(data.table.rows() == 150);
  CHECK(data.table.cols() == 4);
  CHECK(data.class_count() == 3);
  CHECK(data.label_name == "species");
}

TEST_CASE("load_csv errors carry row/column context") {
  const auto bad_cell = write_temp("lacuna_bad.csv", "x,y,label\n1,5,a\n2,oops,b\n");
  CHECK_THROWS_WITH_AS(load_csv(bad_cell), doctest::Contains("row 3"), std::runtime_error);

  const auto bad_width = write_temp("lacuna_width.csv", "x,y,label\n1,5,a\n2,3\n");
  CHECK_THROWS_WITH_AS(load_csv(bad_width), doctest::Contains("row 3"), std::runtime_error);

  const auto empty_row = write_temp("lacuna_empty.csv", "x,y,label\n?,?,a\n2,3,b\n");
  CHECK_THROWS_WITH_AS(load_csv(empty_row), doctest::Contains("no observed"), std::runtime_error);

  const auto empty_label = write_temp("lacuna_nolabel.csv", "x,y,label\n1,5,\n");
  CHECK_THROWS_AS(load_csv(empty_label), std::runtime_error);
}

TEST_CASE("label column can be selected by name or index") {
  const auto path = write_temp("lacuna_labelsel.csv", "label,x,y\na,1,5\nb,2,3\n");
  CsvOptions by_name;
  by_name.label_column = std::string("label");
  const auto d1 = load_csv(path, by_name);
  CHECK(d1.labels == std::vector<std::string>{"a", "b"});
  CHECK(d1.table.attribute_names() == std::vector<std::string>{"x", "y"});

  CsvOptions by_index;
  by_index.label_column = std::size_t{0};
  const auto d2 = load_csv(path, by_index);
  CHECK(d2.labels == d1.labels);
}

TEST_CASE("masked cell reads are a surfaced error") {
  const auto path = write_temp("lacuna_maskedread.csv", "x,y,label\n?,5,a\n2,3,b\n");
  const auto data = load_csv(path);
  CHECK_THROWS_AS(data.table.value(0, 0), std::logic_error);
  CHECK_THROWS_AS(data.table.row(0).value(0), std::logic_error);
}

TEST_CASE("zscore_normalize uses sample std over observed entries") {
  SUBCASE("complete column {1,2,3}") {
    auto t = ObservedTable::complete(3, 1, {1, 2, 3}, {"x"});
    const auto z = zscore_normalize(t);
    // sample std (n-1) of {1,2,3} is 1, so values shift to {-1, 0, 1}
    CHECK(z.value(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(z.value(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(z.value(2, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("constant column shifts to zero") {
    auto t = ObservedTable::complete(3, 1, {5, 5, 5}, {"x"});
    const auto z = zscore_normalize(t);
    for (std::size_t i = 0; i < 3; ++i) CHECK(z.value(i, 0) == 0.0);
  }
  SUBCASE("masked entries are excluded from the statistics") {
    auto t = ObservedTable::from_parts(3, 2, {1, 9, 0, 9, 3, 9}, {1, 1, 0, 1, 1, 1}, {"x", "y"});
    const auto z = zscore_normalize(t);
    // stats over {1,3}: mean 2, sample std sqrt(2)
    CHECK(z.value(0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(z.value(2, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK_FALSE(z.observed(1, 0));
  }
}

TEST_CASE("normalization invariants on random incomplete tables") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto t = testsupport::make_incomplete(80, 6, 0.3, seed);
    const auto z = zscore_normalize(t);
    CHECK(z.rows() == t.rows());
    CHECK(z.cols() == t.cols());
    CHECK(z.raw_mask() == t.raw_mask());
    for (std::size_t l = 0; l < z.cols(); ++l) {
      const auto [mean, sd] = column_stats(z, l);
      CHECK(std::abs(mean) < 1e-9);
      CHECK(std::abs(sd - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("csv round-trip preserves values and mask") {
  const auto t = testsupport::make_incomplete(40, 5, 0.25, 99);
  const auto path = write_temp("lacuna_roundtrip.csv", "");
  write_csv(t, path);
  const auto back = load_table_csv(path);
  REQUIRE(back.rows() == t.rows());
  REQUIRE(back.cols() == t.cols());
  CHECK(back.raw_mask() == t.raw_mask());
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t l = 0; l < t.cols(); ++l)
      if (t.observed(i, l))
        CHECK(back.value(i, l) == doctest::Approx(t.value(i, l)).epsilon(1e-8));
}

TEST_CASE("split_train_test is deterministic, disjoint and stratified") {
  const auto data = load_csv(std::string(LACUNA_DATA_DIR) + "/iris.csv");

  auto [train, test] = split_train_test(data, 0.2, 7);
  CHECK(train.rows() == 120);
  CHECK(test.rows() == 30);

  auto [train2, test2] = split_train_test(data, 0.2, 7);
  CHECK(train2.table.raw_values() == train.table.raw_values());
  CHECK(test2.labels == test.labels);

  // each class contributes ~10 test rows
  for (const auto& label : data.label_set()) {
    const auto cnt = std::count(test.labels.begin(), test.labels.end(), label);
    CHECK(cnt == 10);
  }

  // disjoint exhaustive row partition: multiset of rows is preserved
  std::multiset<double> original, recombined;
  for (std::size_t i = 0; i < data.rows(); ++i) original.insert(data.table.value(i, 0));
  for (std::size_t i = 0; i < train.rows(); ++i) recombined.insert(train.table.value(i, 0));
  for (std::size_t i = 0; i < test.rows(); ++i) recombined.insert(test.table.value(i, 0));
  CHECK(original == recombined);
}

TEST_CASE("split_train_test rejects degenerate fractions") {
  const auto data = load_csv(std::string(LACUNA_DATA_DIR) + "/iris.csv");
  CHECK_THROWS_AS(split_train_test(data, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_train_test(data, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_train_test(data, -0.5, 1), std::invalid_argument);
}

TEST_CASE("split falls back to plain sampling when a class is a singleton") {
  const auto path = write_temp("lacuna_singleton.csv",
                               "x,label\n1,a\n2,a\n3,a\n4,a\n5,a\n6,a\n7,a\n8,a\n9,b\n");
  const auto data = load_csv(path);
  const auto [train, test] = split_train_test(data, 0.3, 11);
  CHECK(train.rows() + test.rows() == 9);
  CHECK(train.rows() >= 1);
  CHECK(test.rows() >= 1);
}
