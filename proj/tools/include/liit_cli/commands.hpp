#pragma once

#include "liit_cli/run_config.hpp"

#include <atomic>
#include <iosfwd>

namespace liit::cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 1, kRuntimeFailure = 2 };

/// Writes <out>/<dataset>_scores.csv with row_index,class,score,flag.
int cmd_score(const RunConfig& cfg, std::ostream& log);

/// Trains cfg.train_regime on each dataset; writes model, trace and timing files.
int cmd_train(const RunConfig& cfg, std::ostream& log);

/// Runs the benchmark grid; writes bench_report.json, bench_auc_table.csv, bench_curves.csv.
int cmd_bench(const RunConfig& cfg, std::ostream& log, const std::atomic<bool>* stop = nullptr);

}  // namespace liit::cli
