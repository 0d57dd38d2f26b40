#include "liit/trainer.hpp"

#include "json_util.hpp"
#include "liit/error.hpp"

#include <chrono>

namespace liit {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void LiitConfig::validate() const {
    if (iterations < 1) throw ConfigError("liit.iterations must be >= 1");
    if (epochs_per_iteration < 1) throw ConfigError("liit.epochs_per_iteration must be >= 1");
    if (full_model_max_epochs < 1) throw ConfigError("liit.full_model_max_epochs must be >= 1");
    if (!(c_size_fraction > 0.0 && c_size_fraction <= 1.0)) throw ConfigError("liit.c_size_fraction must lie in (0, 1]");
    lad.validate();
}

NetConfig net_config_for(const SplitDataset& split, const LiitConfig& cfg, int max_epochs) {
    NetConfig net = cfg.net;
    net.input_dim = split.train.cols();
    net.output_dim = split.train.num_classes;
    net.max_epochs = max_epochs;
    return net;
}

std::size_t resolve_c_size(const LiitConfig& cfg, std::size_t n_train, int num_classes) {
    return cfg.sampler.c_size > 0 ? cfg.sampler.c_size : derive_c_size(n_train, num_classes, cfg.c_size_fraction);
}

std::size_t mts_budget(const LiitConfig& cfg, std::size_t n_train, int num_classes) {
    return static_cast<std::size_t>(cfg.iterations) * static_cast<std::size_t>(num_classes) *
           resolve_c_size(cfg, n_train, num_classes);
}

std::pair<DenseNet, TrainOutcome> train_full(const SplitDataset& split, const LiitConfig& cfg) {
    cfg.validate();
    const auto net_cfg = net_config_for(split, cfg, cfg.full_model_max_epochs);
    DenseNet net(net_cfg);
    auto outcome = train_batches(net, split.train, split.validation, net_cfg);
    return {std::move(net), outcome};
}

std::vector<std::vector<RowIndex>> misclassified_by_class(const std::vector<int>& predicted,
                                                          const TabularDataset& ds) {
    if (predicted.size() != ds.rows()) throw DataError("misclassified_by_class: prediction count mismatch");
    std::vector<std::vector<RowIndex>> out(static_cast<std::size_t>(ds.num_classes));
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] != ds.labels[i]) out[static_cast<std::size_t>(ds.labels[i])].push_back(i);
    }
    return out;
}

std::pair<DenseNet, LiitTrace> train_liit(const SplitDataset& split, const LiitConfig& cfg) {
    cfg.validate();
    const auto& train = split.train;
    const int K = train.num_classes;
    for (const auto& members : train.rows_by_class()) {
        if (members.empty()) throw DataError(train.name + ": every class needs at least one training row");
    }

    const auto start = Clock::now();
    LiitTrace trace;
    trace.dataset = train.name;
    trace.strategy = cfg.strategy;
    trace.seed = cfg.sampler.seed;
    trace.n_train = train.rows();
    trace.num_classes = K;
    trace.c_size = resolve_c_size(cfg, train.rows(), K);

    trace.scores = lad_scores_for(train, cfg.lad);
    trace.lad_seconds = seconds_since(start);

    SamplerConfig sampler = cfg.sampler;
    sampler.c_size = trace.c_size;
    trace.mts = init_mts(trace.scores, train.labels, K, cfg.strategy, sampler);

    const auto net_cfg = net_config_for(split, cfg, cfg.epochs_per_iteration);
    DenseNet net(net_cfg);
    for (int it = 0; it < cfg.iterations; ++it) {
        const auto round_start = Clock::now();
        IterationRecord rec;
        rec.iteration = it;
        rec.mts_size = trace.mts.size();
        rec.mts_distinct = trace.mts.distinct();

        const auto outcome = train_batches(net, train, trace.mts.indices, split.validation, net_cfg);
        rec.epochs_run = outcome.epochs_run;
        rec.train_loss = outcome.train_loss;
        rec.validation_loss = outcome.validation_loss;

        const auto wrong = misclassified_by_class(predict(net, train.features), train);
        std::size_t total_wrong = 0;
        for (const auto& rows : wrong) {
            rec.misclassified_per_class.push_back(rows.size());
            total_wrong += rows.size();
        }
        const bool last = it + 1 == cfg.iterations;
        if (total_wrong > 0 && !last) update_mts(trace.mts, wrong, trace.scores, cfg.strategy, sampler, it + 1);
        rec.wall_seconds = seconds_since(round_start);
        trace.iterations.push_back(std::move(rec));
        if (total_wrong == 0) break;
    }
    trace.total_seconds = seconds_since(start);
    return {std::move(net), std::move(trace)};
}

std::string config_to_json(const LiitConfig& cfg) { return nlohmann::json(cfg).dump(); }

LiitConfig config_from_json(const std::string& text) {
    LiitConfig cfg;
    try {
        nlohmann::json::parse(text).get_to(cfg);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid liit config: ") + e.what());
    }
    return cfg;
}

std::string trace_to_json(const LiitTrace& trace, const LiitConfig& cfg) {
    nlohmann::ordered_json j;
    j["dataset"] = trace.dataset;
    j["strategy"] = to_string(trace.strategy);
    j["seed"] = trace.seed;
    j["config"] = nlohmann::json(cfg);
    j["n_train"] = trace.n_train;
    j["c_size"] = trace.c_size;
    j["budget"] = mts_budget(cfg, trace.n_train, trace.num_classes);
    j["total_draws"] = trace.mts.total_draws;
    j["lad_iterations_run"] = trace.scores.iterations_run;
    auto& its = j["iterations"] = nlohmann::ordered_json::array();
    for (const auto& rec : trace.iterations) {
        nlohmann::ordered_json r;
        r["iteration"] = rec.iteration;
        r["mts_size"] = rec.mts_size;
        r["mts_distinct"] = rec.mts_distinct;
        r["misclassified_per_class"] = rec.misclassified_per_class;
        r["epochs_run"] = rec.epochs_run;
        r["train_loss"] = rec.train_loss;
        r["validation_loss"] = rec.validation_loss;
        its.push_back(std::move(r));
    }
    auto& prov = j["provenance"] = nlohmann::ordered_json::array();
    for (const auto& entry : trace.mts.provenance) {
        prov.push_back({{"iteration", entry.iteration}, {"class", entry.class_id}, {"rows", entry.added}});
    }
    return j.dump(1);
}

std::string trace_timing_json(const LiitTrace& trace) {
    nlohmann::ordered_json j;
    j["dataset"] = trace.dataset;
    j["strategy"] = to_string(trace.strategy);
    j["seed"] = trace.seed;
    j["lad_seconds"] = trace.lad_seconds;
    j["total_seconds"] = trace.total_seconds;
    std::vector<double> rounds;
    for (const auto& rec : trace.iterations) rounds.push_back(rec.wall_seconds);
    j["iteration_seconds"] = rounds;
    return j.dump(1);
}

}  // namespace liit
