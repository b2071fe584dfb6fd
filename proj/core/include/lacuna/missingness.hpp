#pragma once

#include <cstdint>
#include <string>

#include "lacuna/dataset.hpp"

namespace lacuna {

enum class Mechanism { MCAR, MAR, MNAR1, MNAR2 };

Mechanism mechanism_from_string(const std::string& name);
std::string to_string(Mechanism mechanism);

/// Parameters of one simulated missingness pattern. All four simulators are
/// pure functions of (table, spec): equal inputs give bit-identical masks.
struct MissingnessSpec {
  Mechanism mechanism = Mechanism::MCAR;
  double target_fraction = 0.25;        // fraction of all n*m cells to mask
  std::uint64_t seed = 0;
  double mar_determinant_fraction = 0.5;  // share of attributes never masked (MAR/MNAR2)
  double quantile = 0.5;                  // own-value threshold for MNAR1/MNAR2

  void validate() const;
};

/// Masks exactly floor(target_fraction * n * m) cells, uniformly at random
/// without replacement; draws that would leave a row with no observed
/// attribute are skipped. Requires a fully observed input and
/// target_fraction < (m-1)/m.
ObservedTable apply_mcar(const ObservedTable& table, const MissingnessSpec& spec);

/// Splits attributes into determinants (never masked) and dependents. A
/// dependent cell is masked with probability p_hi when the instance's mean
/// determinant value exceeds the dataset median of that statistic, p_lo
/// otherwise, with p_hi = 3 * p_lo and the pair calibrated so the expected
/// masked count equals target_fraction * n * m.
ObservedTable apply_mar(const ObservedTable& table, const MissingnessSpec& spec);

/// A cell is maskable only when its own value lies above its attribute's
/// `quantile` threshold; maskable cells are masked with a uniform
/// probability calibrated to the target fraction. Rows that would lose all
/// attributes are redrawn.
ObservedTable apply_mnar1(const ObservedTable& table, const MissingnessSpec& spec);

/// MAR and MNAR-1 combined: only dependent cells above their own-value
/// quantile are maskable, and the masking probability is scaled by the
/// instance's determinant statistic as in apply_mar.
ObservedTable apply_mnar2(const ObservedTable& table, const MissingnessSpec& spec);

/// Dispatch on spec.mechanism.
ObservedTable apply_missingness(const ObservedTable& table, const MissingnessSpec& spec);

}  // namespace lacuna
