#include "liit/lad.hpp"

#include "liit/error.hpp"
#include "liit/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace liit {

void LadConfig::validate() const {
    if (n_iter < 1) throw ConfigError("lad.n_iter must be >= 1");
    if (!(initial_threshold > 0.0 && initial_threshold <= 1.0)) {
        throw ConfigError("lad.initial_threshold must lie in (0, 1]");
    }
    if (!(quantile_level >= 0.0 && quantile_level <= 1.0)) throw ConfigError("lad.quantile_level must lie in [0, 1]");
    if (!(variance_floor > 0.0)) throw ConfigError("lad.variance_floor must be positive");
}

ScoreVector lad_scores(const Matrix& X, const LadConfig& cfg) {
    cfg.validate();
    const auto n = X.rows();
    const auto d = X.cols();
    if (n < 2) throw DataError("lad_scores needs at least 2 rows");
    if (d < 1) throw DataError("lad_scores needs at least 1 column");
    if (!X.allFinite()) throw DataError("lad_scores: non-finite input");

    ScoreVector out;
    out.scores.assign(static_cast<std::size_t>(n), 0.0);
    out.flags.assign(static_cast<std::size_t>(n), 0);

    const double two_n = 2.0 * static_cast<double>(n);
    double th = cfg.initial_threshold;
    Vector center(d), scale(d);
    std::vector<double> a(static_cast<std::size_t>(n));

    for (int s = 0; s < cfg.n_iter; ++s) {
        const auto unflagged = std::count(out.flags.begin(), out.flags.end(), 0);
        if (unflagged < 2) break;

        for (Eigen::Index j = 0; j < d; ++j) {
            double sum = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (out.flags[static_cast<std::size_t>(i)] == 0) sum += X(i, j);
            }
            const double mu = sum / static_cast<double>(unflagged);
            double ss = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (out.flags[static_cast<std::size_t>(i)] == 0) {
                    const double dev = X(i, j) - mu;
                    ss += dev * dev;
                }
            }
            const double var = ss / static_cast<double>(unflagged);
            center(j) = mu;
            scale(j) = cfg.divisor == LadDivisor::Variance ? std::max(var, cfg.variance_floor)
                                                           : std::max(std::sqrt(var), cfg.variance_floor);
        }

        for (Eigen::Index i = 0; i < n; ++i) {
            double max_entropy = -std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < d; ++j) {
                const double z = (X(i, j) - center(j)) / scale(j);
                max_entropy = std::max(max_entropy, -(z * z) / two_n);
            }
            a[static_cast<std::size_t>(i)] = -max_entropy;
        }

        const auto [lo_it, hi_it] = std::minmax_element(a.begin(), a.end());
        const double lo = *lo_it;
        const double range = *hi_it - lo;
        for (auto& v : a) v = range > 0.0 ? (v - lo) / range : 0.0;

        th = std::min(th, quantile_linear(a, cfg.quantile_level));
        for (std::size_t i = 0; i < a.size(); ++i) out.flags[i] = a[i] > th ? 1 : 0;
        out.scores = a;
        out.iterations_run = s + 1;

        if (std::all_of(out.flags.begin(), out.flags.end(), [](int f) { return f == 1; })) break;
    }
    out.thresholds = {th};
    return out;
}

ScoreVector lad_scores_by_class(const Matrix& X, std::span<const int> labels, int num_classes,
                                const LadConfig& cfg) {
    cfg.validate();
    if (labels.size() != static_cast<std::size_t>(X.rows())) throw DataError("lad_scores_by_class: label count mismatch");
    if (num_classes < 1) throw DataError("lad_scores_by_class: empty class list");

    std::vector<std::vector<RowIndex>> members(static_cast<std::size_t>(num_classes));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= num_classes) throw DataError("lad_scores_by_class: label out of range");
        members[static_cast<std::size_t>(labels[i])].push_back(i);
    }

    ScoreVector out;
    out.scores.assign(labels.size(), 0.0);
    out.flags.assign(labels.size(), 0);
    out.thresholds.assign(static_cast<std::size_t>(num_classes), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < members.size(); ++k) {
        const auto& rows = members[k];
        if (rows.size() < 2) continue;
        Matrix block(static_cast<Eigen::Index>(rows.size()), X.cols());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            block.row(static_cast<Eigen::Index>(r)) = X.row(static_cast<Eigen::Index>(rows[r]));
        }
        const auto local = lad_scores(block, cfg);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            out.scores[rows[r]] = local.scores[r];
            out.flags[rows[r]] = local.flags[r];
        }
        out.thresholds[k] = local.thresholds.front();
        out.iterations_run = std::max(out.iterations_run, local.iterations_run);
    }
    return out;
}

ScoreVector lad_scores_by_class(const TabularDataset& ds, const LadConfig& cfg) {
    return lad_scores_by_class(ds.features, ds.labels, ds.num_classes, cfg);
}

ScoreVector lad_scores_for(const TabularDataset& ds, const LadConfig& cfg) {
    return cfg.scope == ScoringScope::PerClass ? lad_scores_by_class(ds, cfg) : lad_scores(ds.features, cfg);
}

std::string to_string(LadDivisor d) { return d == LadDivisor::Variance ? "variance" : "stddev"; }
std::string to_string(ScoringScope s) { return s == ScoringScope::PerClass ? "per_class" : "global"; }

LadDivisor parse_divisor(const std::string& s) {
    if (s == "variance") return LadDivisor::Variance;
    if (s == "stddev") return LadDivisor::StdDev;
    throw ConfigError("unknown lad divisor '" + s + "' (expected variance|stddev)");
}

ScoringScope parse_scope(const std::string& s) {
    if (s == "per_class") return ScoringScope::PerClass;
    if (s == "global") return ScoringScope::Global;
    throw ConfigError("unknown scoring scope '" + s + "' (expected per_class|global)");
}

}  // namespace liit
