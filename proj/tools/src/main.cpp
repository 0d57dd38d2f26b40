#include "liit_cli/commands.hpp"
#include "liit_cli/run_config.hpp"

#include <liit/error.hpp>

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <iostream>

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_interrupt(int) { g_stop.store(true); }

}  // namespace

int main(int argc, char** argv) {
    using namespace liit::cli;

    CLI::App app{"liit: LAD anomaly scoring and LAD-improved iterative training"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides overrides;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "Run configuration (JSON)")->required();
        sub->add_option("--seed", overrides.seed, "Master seed (overrides config)");
        sub->add_option("-o,--out", overrides.output_dir, "Output directory (overrides config)");
    };

    auto* score = app.add_subcommand("score", "Write per-row LAD scores for each dataset");
    add_common(score);

    auto* train = app.add_subcommand("train", "Train one regime (full or a LIIT strategy) on each dataset");
    add_common(train);
    train->add_option("-s,--strategy", overrides.strategy,
                      "full|anomaly_repeated|anomaly_normal_unique|anomaly_unique|quantile_repeated|random");

    auto* bench = app.add_subcommand("bench", "Run the rerun grid and write AUC/timing/perturbation reports");
    add_common(bench);
    bench->add_option("--regimes", overrides.regimes, "Regimes to compare (default: all five strategies + full)");
    bench->add_option("--reruns", overrides.reruns, "Independent reruns per regime");
    bench->add_option("-j,--jobs", overrides.jobs, "Parallel grid cells (default 1; keep 1 for timing)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kSuccess : kConfigError;
    }

    RunConfig cfg;
    try {
        cfg = load_run_config(config_path, overrides);
    } catch (const liit::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    if (*score) return cmd_score(cfg, std::cerr);
    if (*train) return cmd_train(cfg, std::cerr);
    std::signal(SIGINT, on_interrupt);
    return cmd_bench(cfg, std::cerr, &g_stop);
}
