#include "liit/sampler.hpp"

#include "liit/error.hpp"
#include "liit/quantile.hpp"
#include "liit/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <unordered_set>

namespace liit {
namespace {

/// Candidates ordered by (score, row) ascending.
std::vector<RowIndex> by_score_ascending(std::span<const RowIndex> rows, const ScoreVector& scores) {
    std::vector<RowIndex> out(rows.begin(), rows.end());
    std::sort(out.begin(), out.end(), [&](RowIndex a, RowIndex b) {
        if (scores.scores[a] != scores.scores[b]) return scores.scores[a] < scores.scores[b];
        return a < b;
    });
    return out;
}

/// Candidates ordered by score descending, row ascending.
std::vector<RowIndex> by_score_descending(std::span<const RowIndex> rows, const ScoreVector& scores) {
    std::vector<RowIndex> out(rows.begin(), rows.end());
    std::sort(out.begin(), out.end(), [&](RowIndex a, RowIndex b) {
        if (scores.scores[a] != scores.scores[b]) return scores.scores[a] > scores.scores[b];
        return a < b;
    });
    return out;
}

std::vector<RowIndex> draw_uniform(std::span<const RowIndex> rows, std::size_t count, std::uint64_t seed) {
    std::vector<RowIndex> pool(rows.begin(), rows.end());
    std::sort(pool.begin(), pool.end());
    if (pool.size() <= count) return pool;
    Rng rng(seed);
    // partial Fisher-Yates
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(count);
    return pool;
}

std::vector<RowIndex> nearest_to_quantiles(std::span<const RowIndex> rows, const ScoreVector& scores,
                                           std::size_t c_size) {
    auto ordered = by_score_ascending(rows, scores);
    std::vector<double> sorted(ordered.size());
    for (std::size_t i = 0; i < ordered.size(); ++i) sorted[i] = scores.scores[ordered[i]];

    std::vector<RowIndex> out;
    out.reserve(c_size);
    for (std::size_t t = 0; t < c_size; ++t) {
        const double p = c_size == 1 ? 0.5 : static_cast<double>(t) / static_cast<double>(c_size - 1);
        const double target = quantile_linear_sorted(sorted, p);
        RowIndex best = ordered.front();
        double best_dist = std::numeric_limits<double>::infinity();
        for (RowIndex r : ordered) {
            const double dist = std::abs(scores.scores[r] - target);
            if (dist < best_dist || (dist == best_dist && r < best)) {
                best = r;
                best_dist = dist;
            }
        }
        out.push_back(best);
    }
    return out;
}

void append(MtsSample& mts, int iteration, int class_id, std::vector<RowIndex> rows) {
    mts.total_draws += rows.size();
    mts.indices.insert(mts.indices.end(), rows.begin(), rows.end());
    mts.provenance.push_back({iteration, class_id, std::move(rows)});
}

/// Keeps first occurrences; provenance entries lose the rows that were dropped.
void deduplicate(MtsSample& mts) {
    std::unordered_set<RowIndex> seen;
    std::vector<RowIndex> kept;
    kept.reserve(mts.indices.size());
    for (auto& entry : mts.provenance) {
        std::vector<RowIndex> survivors;
        for (RowIndex r : entry.added) {
            if (seen.insert(r).second) {
                survivors.push_back(r);
                kept.push_back(r);
            }
        }
        entry.added = std::move(survivors);
    }
    mts.indices = std::move(kept);
}

void check_aligned(const ScoreVector& scores, std::size_t n) {
    if (scores.scores.size() != n) throw DataError("sampler: scores not aligned with labels");
}

}  // namespace

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::AnomalyRepeated: return "anomaly_repeated";
        case Strategy::AnomalyNormalUnique: return "anomaly_normal_unique";
        case Strategy::AnomalyUnique: return "anomaly_unique";
        case Strategy::QuantileRepeated: return "quantile_repeated";
        case Strategy::Random: return "random";
    }
    return "unknown";
}

Strategy parse_strategy(const std::string& s) {
    for (auto st : kAllStrategies) {
        if (to_string(st) == s) return st;
    }
    throw ConfigError("unknown strategy '" + s + "'");
}

bool is_unique(Strategy s) { return s == Strategy::AnomalyNormalUnique || s == Strategy::AnomalyUnique; }

std::size_t MtsSample::distinct() const {
    return std::unordered_set<RowIndex>(indices.begin(), indices.end()).size();
}

std::size_t derive_c_size(std::size_t n_train, int num_classes, double fraction) {
    if (num_classes < 1) throw ConfigError("derive_c_size: need at least one class");
    const double raw = fraction * static_cast<double>(n_train) / static_cast<double>(num_classes);
    return static_cast<std::size_t>(std::max(1L, std::lround(raw)));
}

MtsSample init_mts(const ScoreVector& scores, std::span<const int> labels, int num_classes, Strategy strategy,
                   const SamplerConfig& cfg) {
    if (num_classes < 1) throw DataError("init_mts: empty class list");
    if (cfg.c_size < 1) throw ConfigError("sampler.c_size must be >= 1");
    check_aligned(scores, labels.size());

    std::vector<std::vector<RowIndex>> members(static_cast<std::size_t>(num_classes));
    for (std::size_t i = 0; i < labels.size(); ++i) members[static_cast<std::size_t>(labels[i])].push_back(i);

    MtsSample mts;
    for (int k = 0; k < num_classes; ++k) {
        const auto& rows = members[static_cast<std::size_t>(k)];
        std::vector<RowIndex> chosen;
        if (strategy == Strategy::Random) {
            chosen = draw_uniform(rows, cfg.c_size, derive_seed({cfg.seed, 0, static_cast<std::uint64_t>(k)}));
        } else {
            chosen = by_score_ascending(rows, scores);
            if (chosen.size() > cfg.c_size) chosen.resize(cfg.c_size);
        }
        append(mts, 0, k, std::move(chosen));
    }
    return mts;
}

std::vector<RowIndex> select_from_misclassified(std::span<const RowIndex> candidates, const ScoreVector& scores,
                                                Strategy strategy, std::size_t c_size, std::uint64_t seed) {
    if (candidates.empty()) return {};
    if (strategy == Strategy::Random) return draw_uniform(candidates, c_size, seed);
    if (candidates.size() <= c_size) return by_score_descending(candidates, scores);

    switch (strategy) {
        case Strategy::AnomalyRepeated:
        case Strategy::AnomalyUnique: {
            auto top = by_score_descending(candidates, scores);
            top.resize(c_size);
            return top;
        }
        case Strategy::AnomalyNormalUnique: {
            const std::size_t n_low = c_size / 2;
            const std::size_t n_high = c_size - n_low;
            auto asc = by_score_ascending(candidates, scores);
            std::vector<RowIndex> out(asc.begin(), asc.begin() + static_cast<long>(n_low));
            auto desc = by_score_descending(candidates, scores);
            out.insert(out.end(), desc.begin(), desc.begin() + static_cast<long>(n_high));
            return out;
        }
        case Strategy::QuantileRepeated: return nearest_to_quantiles(candidates, scores, c_size);
        case Strategy::Random: break;
    }
    return {};
}

void update_mts(MtsSample& mts, std::span<const std::vector<RowIndex>> misclassified, const ScoreVector& scores,
                Strategy strategy, const SamplerConfig& cfg, int iteration) {
    if (cfg.c_size < 1) throw ConfigError("sampler.c_size must be >= 1");
    for (std::size_t k = 0; k < misclassified.size(); ++k) {
        for (RowIndex r : misclassified[k]) {
            if (r >= scores.size()) throw DataError("update_mts: misclassified row out of range");
        }
        auto chosen = select_from_misclassified(
            misclassified[k], scores, strategy, cfg.c_size,
            derive_seed({cfg.seed, static_cast<std::uint64_t>(iteration), static_cast<std::uint64_t>(k)}));
        if (chosen.empty()) continue;
        append(mts, iteration, static_cast<int>(k), std::move(chosen));
    }
    if (is_unique(strategy)) deduplicate(mts);
}

void write_provenance_csv(const MtsSample& mts, std::ostream& out) {
    out << "iteration,class,row_index\n";
    for (const auto& entry : mts.provenance) {
        for (RowIndex r : entry.added) out << entry.iteration << ',' << entry.class_id << ',' << r << '\n';
    }
}

}  // namespace liit
