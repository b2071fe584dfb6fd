#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace lacuna {

/// Read-only view of one instance: values plus the per-attribute observed
/// mask. Reading the value of an unobserved attribute throws; unobserved
/// slots hold NaN so unchecked reads poison results instead of passing
/// silently.
struct InstanceView {
  std::span<const double> values;
  std::span<const std::uint8_t> mask;

  std::size_t size() const { return values.size(); }
  bool observed(std::size_t l) const { return mask[l] != 0; }
  double value(std::size_t l) const;
};

/// Immutable n x m numeric table with a per-cell observed mask.
/// Every row observes at least one attribute; this is enforced on
/// construction and preserved by every operation in the library.
class ObservedTable {
 public:
  ObservedTable() = default;

  /// Validates shape, the one-observed-attribute-per-row rule, and that all
  /// observed values are finite. Unobserved cells are overwritten with the
  /// NaN sentinel.
  static ObservedTable from_parts(std::size_t rows, std::size_t cols,
                                  std::vector<double> values,
                                  std::vector<std::uint8_t> mask,
                                  std::vector<std::string> attribute_names);

  /// Fully observed table.
  static ObservedTable complete(std::size_t rows, std::size_t cols,
                                std::vector<double> values,
                                std::vector<std::string> attribute_names);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool observed(std::size_t i, std::size_t l) const { return mask_[i * cols_ + l] != 0; }
  double value(std::size_t i, std::size_t l) const;

  InstanceView row(std::size_t i) const {
    return {std::span<const double>(values_.data() + i * cols_, cols_),
            std::span<const std::uint8_t>(mask_.data() + i * cols_, cols_)};
  }

  const std::vector<std::string>& attribute_names() const { return attribute_names_; }
  const std::vector<double>& raw_values() const { return values_; }
  const std::vector<std::uint8_t>& raw_mask() const { return mask_; }

  std::size_t observed_count() const;
  double missing_fraction() const;

  /// Rows of `other` appended below this table; attribute names must agree.
  ObservedTable concat(const ObservedTable& other) const;

  /// Subset of rows, in the order given.
  ObservedTable take_rows(std::span<const std::size_t> indices) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<std::uint8_t> mask_;
  std::vector<std::string> attribute_names_;
};

/// Table plus one class label per row.
struct LabeledDataset {
  ObservedTable table;
  std::vector<std::string> labels;
  std::string label_name = "label";

  std::size_t rows() const { return table.rows(); }
  std::vector<std::string> label_set() const;  // distinct labels, sorted
  std::size_t class_count() const { return label_set().size(); }
};

/// Label column selector: by name, by zero-based column index, or the last
/// column when unset.
using LabelColumn = std::variant<std::monostate, std::size_t, std::string>;

struct CsvOptions {
  // Case-insensitive markers recognised as missing on input.
  std::vector<std::string> missing_markers{"", "?", "NA", "NaN"};
  LabelColumn label_column{};  // default: last column
};

/// Loads a labeled CSV (header row, one label column, "." decimal point).
/// Throws std::runtime_error with row/column context on unparseable cells,
/// inconsistent column counts, or rows with no observed attribute.
LabeledDataset load_csv(const std::string& path, const CsvOptions& options = {});

/// Loads a CSV with no label column; every column is an attribute.
ObservedTable load_table_csv(const std::string& path, const CsvOptions& options = {});

/// Writes values with 9 significant digits; unobserved cells as `marker`.
void write_csv(const ObservedTable& table, const std::string& path,
               const std::string& marker = "?");
void write_csv(const LabeledDataset& dataset, const std::string& path,
               const std::string& marker = "?");

/// Per attribute, shifts/scales the observed entries to mean 0 and sample
/// standard deviation 1 (n-1 denominator). Attributes whose observed entries
/// are constant are shifted to 0 and left unscaled. The mask is unchanged.
ObservedTable zscore_normalize(const ObservedTable& table);

/// Deterministic train/test split. Stratified by class when every class has
/// at least two instances, plain random otherwise. Throws on a fraction
/// outside (0,1) or when either side would be empty.
std::pair<LabeledDataset, LabeledDataset> split_train_test(const LabeledDataset& dataset,
                                                           double test_fraction,
                                                           std::uint64_t seed);

}  // namespace lacuna
