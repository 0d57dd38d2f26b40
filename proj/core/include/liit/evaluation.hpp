#pragma once

#include "liit/dataset.hpp"
#include "liit/sampler.hpp"
#include "liit/trainer.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace liit {

/// ROC AUC via the rank statistic with mid-ranks for ties.
/// Empty optional when `y_true` lacks either class.
std::optional<double> binary_auc(std::span<const int> y_true, std::span<const double> positive_score,
                                 int positive_class = 1);

/// K == 2: AUC of column 1. K > 2: macro one-vs-rest average over the
/// classes present in y_true. Empty optional when fewer than two classes occur.
std::optional<double> auc(std::span<const int> y_true, const Matrix& proba);

/// How the perturbation level scales the training statistics.
enum class PerturbMode {
    ScaleVariance,  ///< noise ~ N(p * mean, p * variance)
    ScaleStdDev,    ///< noise ~ N(p * mean, (p * stddev)^2)
};

struct PerturbSpec {
    std::vector<double> levels{0.0, 0.02, 0.04, 0.06, 0.08};
    PerturbMode mode = PerturbMode::ScaleVariance;
    std::uint64_t seed = 0;

    void validate() const;
};

/// X plus independent diagonal-Gaussian noise per row. p == 0 returns X unchanged.
Matrix perturb(const Matrix& X, const TrainStats& stats, double level, std::uint64_t seed,
               PerturbMode mode = PerturbMode::ScaleVariance);

/// A training regime: the full-data baseline or LIIT with one strategy.
struct Regime {
    std::optional<Strategy> strategy;  ///< empty = full model

    static Regime full() { return {}; }
    static Regime liit(Strategy s) { return {s}; }
    [[nodiscard]] bool is_full() const { return !strategy.has_value(); }
    [[nodiscard]] std::string name() const;
    static Regime parse(const std::string& s);
    bool operator==(const Regime&) const = default;
};

struct RunRecord {
    int rerun = 0;
    std::uint64_t split_seed = 0;
    std::uint64_t model_seed = 0;
    bool ok = false;
    std::string error;
    std::optional<double> auc;
    /// One entry per perturbation level.
    std::vector<std::optional<double>> perturbed_auc;
    double lad_seconds = 0.0;
    double train_seconds = 0.0;
    double total_seconds = 0.0;
    std::size_t n_train = 0;
    int epochs_total = 0;
    /// Per LIIT round (a single entry for the full model).
    std::vector<int> epochs_per_iteration;
    std::size_t total_draws = 0;
    std::size_t mts_final_size = 0;
};

struct CurvePoint {
    double level = 0.0;
    double mean_auc = 0.0;
    double std_auc = 0.0;
};

struct EvalReport {
    std::string dataset;
    std::string regime;
    std::vector<std::uint64_t> rerun_seeds;
    std::vector<RunRecord> runs;
    double mean_auc = 0.0;
    double std_auc = 0.0;
    double mean_lad_seconds = 0.0;
    double mean_train_seconds = 0.0;
    double mean_total_seconds = 0.0;
    std::vector<CurvePoint> curve;
    bool complete = true;
    std::vector<std::string> failures;
};

/// Recomputes the mean/std fields from `runs` (population std).
void aggregate(EvalReport& report, std::span<const double> levels);

struct BenchmarkOptions {
    int reruns = 5;
    std::uint64_t master_seed = 0;
    LiitConfig liit;
    PerturbSpec perturbation;
    /// Worker threads for grid cells; 1 keeps timings free of core sharing.
    int jobs = 1;
    /// When set and raised, cells not yet started are skipped and their
    /// reports marked incomplete.
    const std::atomic<bool>* stop = nullptr;
    std::function<void(const std::string&)> progress;
};

/// Trains every (dataset, regime, rerun) cell and evaluates clean and
/// perturbed test AUC on the same model. One report per (dataset, regime),
/// in input order.
std::vector<EvalReport> run_benchmark(std::span<const TabularDataset> datasets, std::span<const Regime> regimes,
                                      const BenchmarkOptions& options);

/// Seeds used for a cell; exposed so reports can be audited.
std::uint64_t split_seed_for(std::uint64_t master, std::size_t dataset_index, int rerun);
std::uint64_t model_seed_for(std::uint64_t master, std::size_t dataset_index, const Regime& regime, int rerun);
std::uint64_t perturb_seed_for(std::uint64_t master, std::size_t dataset_index, int rerun, std::size_t level_index);

/// Machine-readable report list; `provenance_json` (a JSON object) is embedded verbatim.
std::string reports_to_json(std::span<const EvalReport> reports, const std::string& provenance_json = "{}");

/// Table with one row per dataset and one column per regime; cells read "mean (± std)".
void write_auc_table(std::span<const EvalReport> reports, std::ostream& out);

struct AucCell {
    std::string dataset;
    std::string regime;
    std::optional<double> mean;
    std::optional<double> stddev;
};

/// Parses the table written by write_auc_table.
std::vector<AucCell> read_auc_table(std::istream& in);

/// Long-form perturbation curves: dataset,regime,level,mean_auc,std_auc.
void write_curve_csv(std::span<const EvalReport> reports, std::ostream& out);

}  // namespace liit
