#include "lacuna/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lacuna/random.hpp"

namespace lacuna {

namespace {

constexpr double kSentinel = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Splits one CSV record. Handles double-quoted fields with "" escapes; no
// embedded newlines (none of the supported datasets use them).
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

std::string format_value(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

double InstanceView::value(std::size_t l) const {
  if (!observed(l))
    throw std::logic_error("InstanceView::value: read of unobserved attribute " + std::to_string(l));
  return values[l];
}

double ObservedTable::value(std::size_t i, std::size_t l) const {
  if (!observed(i, l))
    throw std::logic_error("ObservedTable::value: read of unobserved cell (" + std::to_string(i) +
                           "," + std::to_string(l) + ")");
  return values_[i * cols_ + l];
}

ObservedTable ObservedTable::from_parts(std::size_t rows, std::size_t cols,
                                        std::vector<double> values,
                                        std::vector<std::uint8_t> mask,
                                        std::vector<std::string> attribute_names) {
  if (values.size() != rows * cols || mask.size() != rows * cols)
    throw std::invalid_argument("ObservedTable: values/mask size does not match dimensions");
  if (attribute_names.size() != cols)
    throw std::invalid_argument("ObservedTable: attribute name count does not match column count");
  for (std::size_t i = 0; i < rows; ++i) {
    bool any = false;
    for (std::size_t l = 0; l < cols; ++l) {
      const std::size_t idx = i * cols + l;
      if (mask[idx]) {
        any = true;
        if (!std::isfinite(values[idx]))
          throw std::invalid_argument("ObservedTable: non-finite observed value at row " +
                                      std::to_string(i) + ", column " + std::to_string(l));
      } else {
        values[idx] = kSentinel;
      }
    }
    if (!any && cols > 0)
      throw std::invalid_argument("ObservedTable: row " + std::to_string(i) +
                                  " has no observed attribute");
  }
  ObservedTable t;
  t.rows_ = rows;
  t.cols_ = cols;
  t.values_ = std::move(values);
  t.mask_ = std::move(mask);
  t.attribute_names_ = std::move(attribute_names);
  return t;
}

ObservedTable ObservedTable::complete(std::size_t rows, std::size_t cols,
                                      std::vector<double> values,
                                      std::vector<std::string> attribute_names) {
  return from_parts(rows, cols, std::move(values),
                    std::vector<std::uint8_t>(rows * cols, 1), std::move(attribute_names));
}

std::size_t ObservedTable::observed_count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

double ObservedTable::missing_fraction() const {
  if (mask_.empty()) return 0.0;
  return 1.0 - static_cast<double>(observed_count()) / static_cast<double>(mask_.size());
}

ObservedTable ObservedTable::concat(const ObservedTable& other) const {
  if (other.cols_ != cols_ || other.attribute_names_ != attribute_names_)
    throw std::invalid_argument("ObservedTable::concat: attribute mismatch");
  std::vector<double> values = values_;
  values.insert(values.end(), other.values_.begin(), other.values_.end());
  std::vector<std::uint8_t> mask = mask_;
  mask.insert(mask.end(), other.mask_.begin(), other.mask_.end());
  return from_parts(rows_ + other.rows_, cols_, std::move(values), std::move(mask),
                    attribute_names_);
}

ObservedTable ObservedTable::take_rows(std::span<const std::size_t> indices) const {
  std::vector<double> values;
  std::vector<std::uint8_t> mask;
  values.reserve(indices.size() * cols_);
  mask.reserve(indices.size() * cols_);
  for (std::size_t i : indices) {
    if (i >= rows_) throw std::invalid_argument("ObservedTable::take_rows: index out of range");
    values.insert(values.end(), values_.begin() + i * cols_, values_.begin() + (i + 1) * cols_);
    mask.insert(mask.end(), mask_.begin() + i * cols_, mask_.begin() + (i + 1) * cols_);
  }
  return from_parts(indices.size(), cols_, std::move(values), std::move(mask), attribute_names_);
}

std::vector<std::string> LabeledDataset::label_set() const {
  std::set<std::string> s(labels.begin(), labels.end());
  return {s.begin(), s.end()};
}

namespace {

struct ParsedCsv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> records;
};

ParsedCsv read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open file: " + path);
  ParsedCsv out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF)
      line.erase(0, 3);  // UTF-8 BOM
    if (trim(line).empty()) continue;
    auto fields = split_record(line);
    if (out.header.empty()) {
      out.header = std::move(fields);
    } else {
      out.records.push_back(std::move(fields));
    }
  }
  if (out.header.empty()) fail("empty CSV: " + path);
  return out;
}

bool is_missing_marker(const std::string& field, const std::vector<std::string>& markers) {
  const std::string f = to_lower(trim(field));
  for (const auto& m : markers)
    if (f == to_lower(m)) return true;
  return false;
}

std::optional<std::size_t> resolve_label_column(const ParsedCsv& csv, const LabelColumn& sel,
                                                bool labeled) {
  if (!labeled) return std::nullopt;
  const std::size_t ncols = csv.header.size();
  if (std::holds_alternative<std::monostate>(sel)) return ncols - 1;
  if (const auto* idx = std::get_if<std::size_t>(&sel)) {
    if (*idx >= ncols) fail("label column index out of range: " + std::to_string(*idx));
    return *idx;
  }
  const auto& name = std::get<std::string>(sel);
  for (std::size_t c = 0; c < ncols; ++c)
    if (trim(csv.header[c]) == name) return c;
  fail("label column not found: " + name);
  return std::nullopt;  // unreachable
}

LabeledDataset load_impl(const std::string& path, const CsvOptions& options, bool labeled) {
  ParsedCsv csv = read_records(path);
  const std::size_t ncols = csv.header.size();
  if (labeled && ncols < 2) fail("labeled CSV needs at least one attribute column: " + path);
  const auto label_col = resolve_label_column(csv, options.label_column, labeled);

  std::vector<std::string> names;
  for (std::size_t c = 0; c < ncols; ++c)
    if (!label_col || c != *label_col) names.push_back(trim(csv.header[c]));

  const std::size_t m = names.size();
  const std::size_t n = csv.records.size();
  if (n == 0) fail("CSV has no data rows: " + path);

  std::vector<double> values(n * m, 0.0);
  std::vector<std::uint8_t> mask(n * m, 0);
  std::vector<std::string> labels;
  labels.reserve(labeled ? n : 0);

  for (std::size_t r = 0; r < n; ++r) {
    const auto& rec = csv.records[r];
    if (rec.size() != ncols)
      fail(path + ": row " + std::to_string(r + 2) + " has " + std::to_string(rec.size()) +
           " fields, expected " + std::to_string(ncols));
    std::size_t a = 0;
    bool any_observed = false;
    for (std::size_t c = 0; c < ncols; ++c) {
      if (label_col && c == *label_col) {
        const std::string lab = trim(rec[c]);
        if (lab.empty())
          fail(path + ": row " + std::to_string(r + 2) + " has an empty class label");
        labels.push_back(lab);
        continue;
      }
      const std::string field = trim(rec[c]);
      if (is_missing_marker(field, options.missing_markers)) {
        ++a;
        continue;
      }
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v))
        fail(path + ": unparseable cell at row " + std::to_string(r + 2) + ", column \"" +
             trim(csv.header[c]) + "\": \"" + field + "\"");
      values[r * m + a] = v;
      mask[r * m + a] = 1;
      any_observed = true;
      ++a;
    }
    if (!any_observed)
      fail(path + ": row " + std::to_string(r + 2) + " has no observed attribute");
  }

  LabeledDataset out;
  out.table = ObservedTable::from_parts(n, m, std::move(values), std::move(mask), std::move(names));
  out.labels = std::move(labels);
  if (label_col) out.label_name = trim(csv.header[*label_col]);
  return out;
}

}  // namespace

LabeledDataset load_csv(const std::string& path, const CsvOptions& options) {
  return load_impl(path, options, true);
}

ObservedTable load_table_csv(const std::string& path, const CsvOptions& options) {
  return load_impl(path, options, false).table;
}

namespace {

void write_impl(const ObservedTable& table, const std::vector<std::string>* labels,
                const std::string& label_name, const std::string& path,
                const std::string& marker) {
  std::ofstream out(path);
  if (!out) fail("cannot write file: " + path);
  const auto& names = table.attribute_names();
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) out << ',';
    out << names[c];
  }
  if (labels) out << ',' << label_name;
  out << '\n';
  for (std::size_t i = 0; i < table.rows(); ++i) {
    for (std::size_t l = 0; l < table.cols(); ++l) {
      if (l) out << ',';
      if (table.observed(i, l))
        out << format_value(table.value(i, l));
      else
        out << marker;
    }
    if (labels) out << ',' << (*labels)[i];
    out << '\n';
  }
  if (!out) fail("write failed: " + path);
}

}  // namespace

void write_csv(const ObservedTable& table, const std::string& path, const std::string& marker) {
  write_impl(table, nullptr, "", path, marker);
}

void write_csv(const LabeledDataset& dataset, const std::string& path, const std::string& marker) {
  if (dataset.labels.size() != dataset.table.rows())
    throw std::invalid_argument("write_csv: label count does not match row count");
  write_impl(dataset.table, &dataset.labels, dataset.label_name, path, marker);
}

ObservedTable zscore_normalize(const ObservedTable& table) {
  const std::size_t n = table.rows(), m = table.cols();
  std::vector<double> values = table.raw_values();
  std::vector<std::uint8_t> mask = table.raw_mask();

  for (std::size_t l = 0; l < m; ++l) {
    double sum = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i * m + l]) {
        sum += values[i * m + l];
        ++cnt;
      }
    }
    if (cnt == 0) continue;
    const double mean = sum / static_cast<double>(cnt);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i * m + l]) {
        const double d = values[i * m + l] - mean;
        ss += d * d;
      }
    }
    const double sd = cnt > 1 ? std::sqrt(ss / static_cast<double>(cnt - 1)) : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i * m + l]) {
        double& v = values[i * m + l];
        v = sd > 0.0 ? (v - mean) / sd : 0.0;
      }
    }
  }
  return ObservedTable::from_parts(n, m, std::move(values), std::move(mask),
                                   table.attribute_names());
}

std::pair<LabeledDataset, LabeledDataset> split_train_test(const LabeledDataset& dataset,
                                                           double test_fraction,
                                                           std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("split_train_test: test_fraction must lie in (0,1)");
  const std::size_t n = dataset.rows();
  if (dataset.labels.size() != n)
    throw std::invalid_argument("split_train_test: label count does not match row count");

  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < n; ++i) by_class[dataset.labels[i]].push_back(i);
  const bool stratify = std::all_of(by_class.begin(), by_class.end(),
                                    [](const auto& kv) { return kv.second.size() >= 2; });

  auto eng = rng::make_engine(seed);
  std::vector<std::size_t> test_idx;
  if (stratify) {
    for (auto& [label, idx] : by_class) {
      rng::shuffle(idx, eng);
      const auto want = static_cast<std::size_t>(
          std::llround(test_fraction * static_cast<double>(idx.size())));
      const std::size_t take = std::min(want, idx.size() - 1);  // keep >=1 in train per class
      test_idx.insert(test_idx.end(), idx.begin(), idx.begin() + take);
    }
  } else {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    rng::shuffle(idx, eng);
    const auto want = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    const std::size_t take = std::clamp<std::size_t>(want, 1, n - 1);
    test_idx.assign(idx.begin(), idx.begin() + take);
  }
  if (test_idx.empty() || test_idx.size() >= n)
    throw std::invalid_argument("split_train_test: fraction leaves an empty split");

  std::sort(test_idx.begin(), test_idx.end());
  std::vector<std::size_t> train_idx;
  train_idx.reserve(n - test_idx.size());
  {
    std::size_t t = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (t < test_idx.size() && test_idx[t] == i)
        ++t;
      else
        train_idx.push_back(i);
    }
  }

  auto subset = [&](const std::vector<std::size_t>& idx) {
    LabeledDataset d;
    d.table = dataset.table.take_rows(idx);
    d.labels.reserve(idx.size());
    for (std::size_t i : idx) d.labels.push_back(dataset.labels[i]);
    d.label_name = dataset.label_name;
    return d;
  };
  return {subset(train_idx), subset(test_idx)};
}

}  // namespace lacuna
