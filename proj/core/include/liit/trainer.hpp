#pragma once

#include "liit/dataset.hpp"
#include "liit/dense_net.hpp"
#include "liit/lad.hpp"
#include "liit/sampler.hpp"

#include <string>
#include <utility>
#include <vector>

namespace liit {

struct LiitConfig {
    /// Training rounds: one on the initial sample plus (iterations - 1) updates.
    int iterations = 6;
    int epochs_per_iteration = 30;
    int full_model_max_epochs = 180;
    double c_size_fraction = 0.055;
    Strategy strategy = Strategy::QuantileRepeated;
    SamplerConfig sampler;
    LadConfig lad;
    /// input_dim and output_dim are filled in from the data.
    NetConfig net;

    void validate() const;
};

struct IterationRecord {
    int iteration = 0;
    /// Rows (with repeats) the net trained on this round.
    std::size_t mts_size = 0;
    std::size_t mts_distinct = 0;
    std::vector<std::size_t> misclassified_per_class;
    int epochs_run = 0;
    double train_loss = 0.0;
    double validation_loss = 0.0;
    double wall_seconds = 0.0;
};

struct LiitTrace {
    std::string dataset;
    Strategy strategy = Strategy::QuantileRepeated;
    std::uint64_t seed = 0;
    std::size_t n_train = 0;
    int num_classes = 0;
    std::size_t c_size = 0;
    std::vector<IterationRecord> iterations;
    MtsSample mts;
    ScoreVector scores;
    double lad_seconds = 0.0;
    /// LAD scoring + every round of training and full-train prediction.
    double total_seconds = 0.0;
};

/// NetConfig for `split` with shapes and epoch budget filled in.
NetConfig net_config_for(const SplitDataset& split, const LiitConfig& cfg, int max_epochs);

/// Resolved per-class sample size: cfg.sampler.c_size if set, else derived.
std::size_t resolve_c_size(const LiitConfig& cfg, std::size_t n_train, int num_classes);

/// Baseline: batch training on the whole train partition.
std::pair<DenseNet, TrainOutcome> train_full(const SplitDataset& split, const LiitConfig& cfg);

/// Score once, seed the sample, then alternate training the same net on the
/// sample with growing it from the rows it still misclassifies.
std::pair<DenseNet, LiitTrace> train_liit(const SplitDataset& split, const LiitConfig& cfg);

/// iterations * K * c_size.
std::size_t mts_budget(const LiitConfig& cfg, std::size_t n_train, int num_classes);

/// Rows of `ds` whose prediction differs from the label, grouped by class.
std::vector<std::vector<RowIndex>> misclassified_by_class(const std::vector<int>& predicted,
                                                          const TabularDataset& ds);

/// JSON {dataset, strategy, seed, config, iterations: [...]} without timings.
std::string trace_to_json(const LiitTrace& trace, const LiitConfig& cfg);
/// Wall-clock timings of the same run.
std::string trace_timing_json(const LiitTrace& trace);

std::string config_to_json(const LiitConfig& cfg);
LiitConfig config_from_json(const std::string& text);

}  // namespace liit
