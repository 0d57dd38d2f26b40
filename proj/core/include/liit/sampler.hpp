#pragma once

#include "liit/dataset.hpp"
#include "liit/lad.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace liit {

/// How the Modified Training Sample (MTS) is seeded and grown.
enum class Strategy {
    AnomalyRepeated,      ///< highest-score misclassified rows; repeats allowed
    AnomalyNormalUnique,  ///< half lowest, half highest; sample kept duplicate-free
    AnomalyUnique,        ///< highest-score rows; sample kept duplicate-free
    QuantileRepeated,     ///< rows nearest evenly spaced score quantiles; repeats allowed
    Random,               ///< uniform draws; baseline
};

inline constexpr std::array<Strategy, 5> kAllStrategies = {
    Strategy::AnomalyRepeated, Strategy::AnomalyNormalUnique, Strategy::AnomalyUnique,
    Strategy::QuantileRepeated, Strategy::Random};

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& s);
bool is_unique(Strategy s);

struct SamplerConfig {
    /// Rows drawn per class per step; 0 means derive from the train size.
    std::size_t c_size = 0;
    std::uint64_t seed = 0;
};

/// Rows actually appended to the sample for one class in one step.
struct ProvenanceEntry {
    int iteration = 0;
    int class_id = 0;
    std::vector<RowIndex> added;
};

struct MtsSample {
    std::vector<RowIndex> indices;
    std::vector<ProvenanceEntry> provenance;
    /// Rows selected before deduplication, summed over all steps.
    std::size_t total_draws = 0;

    [[nodiscard]] std::size_t size() const { return indices.size(); }
    [[nodiscard]] std::size_t distinct() const;
};

/// max(1, round(fraction * n_train / K)).
std::size_t derive_c_size(std::size_t n_train, int num_classes, double fraction = 0.055);

/// Initial sample: per class the c_size lowest-score rows (Random: c_size
/// uniform draws without replacement). Ties break by ascending row index.
MtsSample init_mts(const ScoreVector& scores, std::span<const int> labels, int num_classes, Strategy strategy,
                   const SamplerConfig& cfg);

/// Appends rows chosen from each class's misclassified rows according to the
/// strategy, records provenance under `iteration`, and deduplicates the whole
/// sample (first occurrence wins) for the unique strategies.
/// `misclassified[k]` lists train rows of class k that the model got wrong.
void update_mts(MtsSample& mts, std::span<const std::vector<RowIndex>> misclassified, const ScoreVector& scores,
                Strategy strategy, const SamplerConfig& cfg, int iteration);

/// Rows from `candidates` picked by the strategy's update rule, in append order.
std::vector<RowIndex> select_from_misclassified(std::span<const RowIndex> candidates, const ScoreVector& scores,
                                                Strategy strategy, std::size_t c_size, std::uint64_t seed);

/// CSV with columns iteration,class,row_index; one line per appended row.
void write_provenance_csv(const MtsSample& mts, std::ostream& out);

}  // namespace liit
