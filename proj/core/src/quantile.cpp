#include "liit/quantile.hpp"

#include "liit/error.hpp"

#include <algorithm>
#include <cmath>

namespace liit {

double quantile_linear_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw DataError("quantile of empty sample");
    p = std::clamp(p, 0.0, 1.0);
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double w = h - static_cast<double>(lo);
    return sorted[lo] + w * (sorted[lo + 1] - sorted[lo]);
}

double quantile_linear(std::span<const double> values, double p) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return quantile_linear_sorted(sorted, p);
}

}  // namespace liit
