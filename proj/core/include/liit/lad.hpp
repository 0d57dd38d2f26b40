#pragma once

#include "liit/dataset.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace liit {

/// Column scale used to normalize deviations from the unflagged-row mean.
enum class LadDivisor { Variance, StdDev };

/// Whether LIIT scores rows within their class or over the whole train set.
enum class ScoringScope { PerClass, Global };

struct LadConfig {
    int n_iter = 5;
    double initial_threshold = 1.0;
    double quantile_level = 0.95;
    double variance_floor = 1e-12;
    LadDivisor divisor = LadDivisor::Variance;
    ScoringScope scope = ScoringScope::PerClass;

    void validate() const;
};

struct ScoreVector {
    std::vector<double> scores;  ///< in [0, 1]
    std::vector<int> flags;      ///< 1 = flagged anomalous
    int iterations_run = 0;
    /// Final working threshold of each scoring group (one entry for a global
    /// run, one per class for a per-class run; NaN for classes left unscored).
    std::vector<double> thresholds;

    [[nodiscard]] std::size_t size() const { return scores.size(); }
};

/// Iterative large-deviations anomaly score.
///
/// Each iteration estimates column means and spreads from the rows not yet
/// flagged, scores every row by its Gaussian rate-function entropy
/// E[i,j] = -z[i,j]^2 / 2n with a_i = -max_j E[i,j], min-max scales a to
/// [0, 1], lowers the threshold to the 0.95 quantile of a when that is
/// smaller, and re-flags rows with a_i above the threshold. Stops early when
/// every row is flagged or fewer than two rows stay unflagged.
ScoreVector lad_scores(const Matrix& X, const LadConfig& cfg);

/// Runs lad_scores separately on each class's rows and scatters the results
/// back to global positions. Classes with fewer than two rows score 0.
ScoreVector lad_scores_by_class(const Matrix& X, std::span<const int> labels, int num_classes,
                                const LadConfig& cfg);
ScoreVector lad_scores_by_class(const TabularDataset& ds, const LadConfig& cfg);

/// Dispatches on cfg.scope.
ScoreVector lad_scores_for(const TabularDataset& ds, const LadConfig& cfg);

std::string to_string(LadDivisor d);
std::string to_string(ScoringScope s);
LadDivisor parse_divisor(const std::string& s);
ScoringScope parse_scope(const std::string& s);

}  // namespace liit
