#pragma once

#include <cstddef>

#include "lacuna/dataset.hpp"

namespace lacuna {

/// Every masked cell set to 0.
ObservedTable impute_zero(const ObservedTable& table);

/// Every masked cell set to the mean of its attribute's observed entries.
/// Throws when some attribute is observed nowhere.
ObservedTable impute_mean(const ObservedTable& table);

/// Each masked cell (i,l) filled with the mean of attribute l over the k
/// nearest neighbors of instance i. Neighbors are ranked by
/// observed_distance among instances that observe l; distance ties break
/// toward the lower row index; fewer than k observers means all are used.
ObservedTable impute_knn(const ObservedTable& table, std::size_t k);

}  // namespace lacuna
