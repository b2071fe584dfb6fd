#include "lacuna/missingness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lacuna/random.hpp"

namespace lacuna {

Mechanism mechanism_from_string(const std::string& name) {
  if (name == "mcar") return Mechanism::MCAR;
  if (name == "mar") return Mechanism::MAR;
  if (name == "mnar1") return Mechanism::MNAR1;
  if (name == "mnar2") return Mechanism::MNAR2;
  throw std::invalid_argument("unknown missingness mechanism: " + name);
}

std::string to_string(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::MCAR: return "mcar";
    case Mechanism::MAR: return "mar";
    case Mechanism::MNAR1: return "mnar1";
    case Mechanism::MNAR2: return "mnar2";
  }
  throw std::logic_error("to_string: invalid mechanism");
}

void MissingnessSpec::validate() const {
  if (!(target_fraction >= 0.0 && target_fraction < 1.0))
    throw std::invalid_argument("MissingnessSpec: target_fraction must lie in [0,1)");
  if (!(quantile > 0.0 && quantile < 1.0))
    throw std::invalid_argument("MissingnessSpec: quantile must lie in (0,1)");
  if (!(mar_determinant_fraction > 0.0 && mar_determinant_fraction < 1.0))
    throw std::invalid_argument("MissingnessSpec: mar_determinant_fraction must lie in (0,1)");
}

namespace {

void require_complete(const ObservedTable& table, const char* op) {
  if (table.observed_count() != table.rows() * table.cols())
    throw std::invalid_argument(std::string(op) + ": input table must be fully observed");
}

ObservedTable with_mask(const ObservedTable& table, std::vector<std::uint8_t> mask) {
  return ObservedTable::from_parts(table.rows(), table.cols(), table.raw_values(),
                                   std::move(mask), table.attribute_names());
}

// Seeded split of {0..m-1} into determinant attributes (never masked) and
// dependent attributes (maskable).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_attributes(
    std::size_t m, double determinant_fraction, rng::Engine& eng) {
  std::vector<std::size_t> attrs(m);
  std::iota(attrs.begin(), attrs.end(), 0);
  rng::shuffle(attrs, eng);
  auto n_det = static_cast<std::size_t>(
      std::llround(determinant_fraction * static_cast<double>(m)));
  n_det = std::clamp<std::size_t>(n_det, 1, m - 1);
  std::vector<std::size_t> determinants(attrs.begin(), attrs.begin() + n_det);
  std::vector<std::size_t> dependents(attrs.begin() + n_det, attrs.end());
  std::sort(determinants.begin(), determinants.end());
  std::sort(dependents.begin(), dependents.end());
  return {determinants, dependents};
}

// true for instances whose mean determinant value exceeds the dataset
// median of that statistic.
std::vector<std::uint8_t> high_determinant_rows(const ObservedTable& table,
                                                const std::vector<std::size_t>& determinants) {
  const std::size_t n = table.rows();
  std::vector<double> stat(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t l : determinants) s += table.value(i, l);
    stat[i] = s / static_cast<double>(determinants.size());
  }
  std::vector<double> sorted = stat;
  std::sort(sorted.begin(), sorted.end());
  const double median = n % 2 ? sorted[n / 2]
                              : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  std::vector<std::uint8_t> high(n, 0);
  for (std::size_t i = 0; i < n; ++i) high[i] = stat[i] > median ? 1 : 0;
  return high;
}

// Nearest-rank quantile threshold per attribute; a cell is maskable when its
// value is strictly above its attribute's threshold.
std::vector<double> quantile_thresholds(const ObservedTable& table, double q) {
  const std::size_t n = table.rows(), m = table.cols();
  std::vector<double> thresholds(m);
  std::vector<double> column(n);
  for (std::size_t l = 0; l < m; ++l) {
    for (std::size_t i = 0; i < n; ++i) column[i] = table.value(i, l);
    std::sort(column.begin(), column.end());
    const auto rank = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(n)));
    thresholds[l] = column[std::min(n - 1, rank > 0 ? rank - 1 : 0)];
  }
  return thresholds;
}

// p_lo such that p_lo * (3*high_count + low_count) == target_cells, i.e. the
// expected masked count hits the target with p_hi = 3*p_lo. When p_hi would
// exceed 1 it is clamped and p_lo re-solved to keep the expectation.
std::pair<double, double> calibrate_two_rates(double target_cells, double high_count,
                                              double low_count, const char* op) {
  if (target_cells <= 0.0) return {0.0, 0.0};
  if (target_cells > high_count + low_count + 1e-9)
    throw std::invalid_argument(std::string(op) + ": target fraction exceeds the maskable budget");
  double p_lo = target_cells / (3.0 * high_count + low_count);
  double p_hi = 3.0 * p_lo;
  if (p_hi > 1.0) {
    p_hi = 1.0;
    p_lo = low_count > 0.0 ? (target_cells - high_count) / low_count : 0.0;
    p_lo = std::clamp(p_lo, 0.0, 1.0);
  }
  return {p_hi, p_lo};
}

}  // namespace

ObservedTable apply_mcar(const ObservedTable& table, const MissingnessSpec& spec) {
  spec.validate();
  require_complete(table, "apply_mcar");
  const std::size_t n = table.rows(), m = table.cols();
  const auto target = static_cast<std::size_t>(
      std::floor(spec.target_fraction * static_cast<double>(n * m)));
  if (target == 0) return table;
  if (spec.target_fraction >= static_cast<double>(m - 1) / static_cast<double>(m))
    throw std::invalid_argument(
        "apply_mcar: target fraction leaves some row without observed attributes");

  auto eng = rng::make_engine(spec.seed);
  std::vector<std::uint8_t> mask(n * m, 1);
  std::vector<std::size_t> row_observed(n, m);

  // Cells eligible for masking: observed cells in rows that still have at
  // least two observed attributes. Swap-remove keeps draws O(1).
  std::vector<std::size_t> available(n * m);
  std::iota(available.begin(), available.end(), 0);
  std::vector<std::size_t> position(n * m);
  std::iota(position.begin(), position.end(), 0);

  auto remove_available = [&](std::size_t cell) {
    const std::size_t pos = position[cell];
    const std::size_t last = available.back();
    available[pos] = last;
    position[last] = pos;
    available.pop_back();
    position[cell] = n * m;  // out of the pool
  };

  std::size_t masked = 0;
  while (masked < target) {
    const auto j = static_cast<std::size_t>(rng::uniform_below(eng, available.size()));
    const std::size_t cell = available[j];
    remove_available(cell);
    mask[cell] = 0;
    ++masked;
    const std::size_t row = cell / m;
    if (--row_observed[row] == 1) {
      for (std::size_t l = 0; l < m; ++l) {
        const std::size_t c = row * m + l;
        if (mask[c] && position[c] < n * m) {
          remove_available(c);
          break;
        }
      }
    }
  }
  return with_mask(table, std::move(mask));
}

ObservedTable apply_mar(const ObservedTable& table, const MissingnessSpec& spec) {
  spec.validate();
  require_complete(table, "apply_mar");
  const std::size_t n = table.rows(), m = table.cols();
  if (m < 2) throw std::invalid_argument("apply_mar: need at least two attributes");
  if (spec.target_fraction == 0.0) return table;

  auto eng = rng::make_engine(spec.seed);
  const auto [determinants, dependents] = split_attributes(m, spec.mar_determinant_fraction, eng);
  const double dep_share =
      static_cast<double>(dependents.size()) / static_cast<double>(m);
  if (spec.target_fraction > dep_share)
    throw std::invalid_argument(
        "apply_mar: target fraction exceeds the dependent-attribute budget");

  const auto high = high_determinant_rows(table, determinants);
  const double n_high = static_cast<double>(std::count(high.begin(), high.end(), std::uint8_t{1}));
  const double n_low = static_cast<double>(n) - n_high;
  const double target_cells = spec.target_fraction * static_cast<double>(n * m);
  const double dep = static_cast<double>(dependents.size());
  const auto [p_hi, p_lo] =
      calibrate_two_rates(target_cells, n_high * dep, n_low * dep, "apply_mar");

  std::vector<std::uint8_t> mask(n * m, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = high[i] ? p_hi : p_lo;
    for (std::size_t l : dependents)
      if (rng::uniform01(eng) < p) mask[i * m + l] = 0;
  }
  return with_mask(table, std::move(mask));
}

ObservedTable apply_mnar1(const ObservedTable& table, const MissingnessSpec& spec) {
  spec.validate();
  require_complete(table, "apply_mnar1");
  const std::size_t n = table.rows(), m = table.cols();
  if (spec.target_fraction == 0.0) return table;
  if (spec.target_fraction > 1.0 - spec.quantile + 1e-12)
    throw std::invalid_argument("apply_mnar1: target fraction exceeds the maskable budget");

  auto eng = rng::make_engine(spec.seed);
  const auto thresholds = quantile_thresholds(table, spec.quantile);

  std::vector<std::uint8_t> maskable(n * m, 0);
  std::size_t budget = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < m; ++l)
      if (table.value(i, l) > thresholds[l]) {
        maskable[i * m + l] = 1;
        ++budget;
      }

  const double target_cells = spec.target_fraction * static_cast<double>(n * m);
  if (budget == 0 || target_cells > static_cast<double>(budget) + 1e-9)
    throw std::invalid_argument("apply_mnar1: target fraction exceeds the maskable budget");
  const double p = std::min(1.0, target_cells / static_cast<double>(budget));

  std::vector<std::uint8_t> mask(n * m, 1);
  for (std::size_t i = 0; i < n; ++i) {
    auto draw_row = [&] {
      std::size_t observed = 0;
      for (std::size_t l = 0; l < m; ++l) {
        const std::size_t c = i * m + l;
        mask[c] = (maskable[c] && rng::uniform01(eng) < p) ? 0 : 1;
        observed += mask[c];
      }
      return observed;
    };
    // One rejection-resample pass; then force one cell observed if the row
    // is still empty (only reachable when p is at its upper bound).
    if (draw_row() == 0 && draw_row() == 0) {
      const auto keep = static_cast<std::size_t>(rng::uniform_below(eng, m));
      mask[i * m + keep] = 1;
    }
  }
  return with_mask(table, std::move(mask));
}

ObservedTable apply_mnar2(const ObservedTable& table, const MissingnessSpec& spec) {
  spec.validate();
  require_complete(table, "apply_mnar2");
  const std::size_t n = table.rows(), m = table.cols();
  if (m < 2) throw std::invalid_argument("apply_mnar2: need at least two attributes");
  if (spec.target_fraction == 0.0) return table;

  auto eng = rng::make_engine(spec.seed);
  const auto [determinants, dependents] = split_attributes(m, spec.mar_determinant_fraction, eng);
  const auto high = high_determinant_rows(table, determinants);
  const auto thresholds = quantile_thresholds(table, spec.quantile);

  double high_maskable = 0.0, low_maskable = 0.0;
  std::vector<std::uint8_t> maskable(n * m, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l : dependents)
      if (table.value(i, l) > thresholds[l]) {
        maskable[i * m + l] = 1;
        (high[i] ? high_maskable : low_maskable) += 1.0;
      }

  const double target_cells = spec.target_fraction * static_cast<double>(n * m);
  const auto [p_hi, p_lo] =
      calibrate_two_rates(target_cells, high_maskable, low_maskable, "apply_mnar2");

  std::vector<std::uint8_t> mask(n * m, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = high[i] ? p_hi : p_lo;
    for (std::size_t l : dependents) {
      const std::size_t c = i * m + l;
      if (maskable[c] && rng::uniform01(eng) < p) mask[c] = 0;
    }
  }
  return with_mask(table, std::move(mask));
}

ObservedTable apply_missingness(const ObservedTable& table, const MissingnessSpec& spec) {
  switch (spec.mechanism) {
    case Mechanism::MCAR: return apply_mcar(table, spec);
    case Mechanism::MAR: return apply_mar(table, spec);
    case Mechanism::MNAR1: return apply_mnar1(table, spec);
    case Mechanism::MNAR2: return apply_mnar2(table, spec);
  }
  throw std::logic_error("apply_missingness: invalid mechanism");
}

}  // namespace lacuna
