#include "liit_cli/commands.hpp"

#include <liit/error.hpp>
#include <liit/evaluation.hpp>
#include <liit/lad.hpp>
#include <liit/trainer.hpp>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>

namespace liit::cli {
namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

/// Adds a "provenance" member to a JSON document.
std::string with_provenance(const std::string& doc, const std::string& provenance) {
    auto j = ordered_json::parse(doc);
    j["provenance"] = ordered_json::parse(provenance);
    return j.dump(1);
}

void prepare(const RunConfig& cfg) {
    validate(cfg);
    fs::create_directories(cfg.output_dir);
}

template <typename Fn>
int guarded(std::ostream& log, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
}

}  // namespace

int cmd_score(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, [&] {
        prepare(cfg);
        const auto provenance = provenance_json(cfg);
        for (const auto& ref : cfg.datasets) {
            const auto ds = load_dataset(ref);
            const auto scores = lad_scores_for(ds, cfg.liit.lad);
            const auto path = cfg.output_dir / (ds.name + "_scores.csv");
            auto out = open_output(path);
            out << "# liit score provenance=" << provenance << '\n';
            out << "row_index,class,score,flag\n";
            char buf[32];
            for (std::size_t i = 0; i < ds.rows(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.17g", scores.scores[i]);
                out << i << ',' << ds.labels[i] << ',' << buf << ',' << scores.flags[i] << '\n';
            }
            const auto flagged = std::count(scores.flags.begin(), scores.flags.end(), 1);
            log << ds.name << ": scored " << ds.rows() << " rows, " << flagged << " flagged -> " << path.string()
                << '\n';
        }
        return static_cast<int>(kSuccess);
    });
}

int cmd_train(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, [&] {
        prepare(cfg);
        const auto provenance = provenance_json(cfg);
        const auto& regime = cfg.train_regime;
        for (std::size_t di = 0; di < cfg.datasets.size(); ++di) {
            const auto ds = load_dataset(cfg.datasets[di]);
            const auto parts = split(ds, split_seed_for(cfg.seed, di, 0));
            for (const auto& w : parts.warnings) log << ds.name << ": warning: " << w << '\n';

            LiitConfig liit = cfg.liit;
            const auto seed = model_seed_for(cfg.seed, di, regime, 0);
            liit.net.seed = seed;
            liit.sampler.seed = seed;

            const auto stem = cfg.output_dir / (ds.name + "_" + regime.name());
            std::string trace_doc;
            std::string timing_doc;
            std::optional<DenseNet> net;
            if (regime.is_full()) {
                auto [trained, outcome] = train_full(parts, liit);
                net.emplace(std::move(trained));
                ordered_json t;
                t["dataset"] = ds.name;
                t["strategy"] = "full";
                t["seed"] = seed;
                t["n_train"] = parts.train.rows();
                t["iterations"] = ordered_json::array({{{"iteration", 0},
                                                        {"mts_size", parts.train.rows()},
                                                        {"epochs_run", outcome.epochs_run},
                                                        {"train_loss", outcome.train_loss},
                                                        {"validation_loss", outcome.validation_loss},
                                                        {"converged", outcome.converged}}});
                trace_doc = t.dump(1);
                timing_doc = ordered_json{{"dataset", ds.name}, {"strategy", "full"}, {"seed", seed},
                                          {"total_seconds", outcome.wall_seconds}}
                                 .dump(1);
            } else {
                liit.strategy = *regime.strategy;
                auto [trained, trace] = train_liit(parts, liit);
                net.emplace(std::move(trained));
                trace_doc = trace_to_json(trace, liit);
                timing_doc = trace_timing_json(trace);
                auto mts_out = open_output(stem.string() + "_mts.csv");
                mts_out << "# liit train provenance=" << provenance << '\n';
                write_provenance_csv(trace.mts, mts_out);
            }
            open_output(stem.string() + "_model.json") << with_provenance(to_json(*net), provenance) << '\n';
            open_output(stem.string() + "_trace.json") << with_provenance(trace_doc, provenance) << '\n';
            open_output(stem.string() + "_timing.json") << timing_doc << '\n';

            const auto test_auc = auc(parts.test.labels, forward(*net, parts.test.features));
            log << ds.name << " / " << regime.name() << ": test AUC "
                << (test_auc ? std::to_string(*test_auc) : std::string("undefined")) << " -> " << stem.string()
                << "_{model,trace,timing}.json\n";
        }
        return static_cast<int>(kSuccess);
    });
}

int cmd_bench(const RunConfig& cfg, std::ostream& log, const std::atomic<bool>* stop) {
    return guarded(log, [&] {
        prepare(cfg);
        const auto provenance = provenance_json(cfg);
        std::vector<TabularDataset> datasets;
        for (const auto& ref : cfg.datasets) datasets.push_back(load_dataset(ref));

        BenchmarkOptions options;
        options.reruns = cfg.reruns;
        options.master_seed = cfg.seed;
        options.liit = cfg.liit;
        options.perturbation = cfg.perturbation;
        options.jobs = cfg.jobs;
        options.stop = stop;
        options.progress = [&log](const std::string& msg) { log << msg << '\n'; };
        const auto reports = run_benchmark(datasets, cfg.regimes, options);

        open_output(cfg.output_dir / "bench_report.json") << reports_to_json(reports, provenance) << '\n';
        {
            auto table = open_output(cfg.output_dir / "bench_auc_table.csv");
            table << "# liit bench provenance=" << provenance << '\n';
            write_auc_table(reports, table);
        }
        {
            auto curves = open_output(cfg.output_dir / "bench_curves.csv");
            curves << "# liit bench provenance=" << provenance << '\n';
            write_curve_csv(reports, curves);
        }
        const bool complete = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.complete; });
        log << "wrote " << reports.size() << " report rows to " << cfg.output_dir.string()
            << (complete ? "" : " (incomplete)") << '\n';
        return static_cast<int>(complete ? kSuccess : kRuntimeFailure);
    });
}

}  // namespace liit::cli
