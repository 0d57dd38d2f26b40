#pragma once

#include <span>
#include <vector>

namespace liit {

/// Quantile by linear interpolation between order statistics
/// (h = (m-1)p; the "type 7" definition). `p` is clamped to [0, 1].
double quantile_linear(std::span<const double> values, double p);

/// Same, over values already sorted ascending.
double quantile_linear_sorted(std::span<const double> sorted, double p);

}  // namespace liit
