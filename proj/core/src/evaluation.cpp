#include "liit/evaluation.hpp"

#include "liit/error.hpp"
#include "liit/random.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

namespace liit {

std::optional<double> binary_auc(std::span<const int> y_true, std::span<const double> positive_score,
                                 int positive_class) {
    if (y_true.size() != positive_score.size()) throw DataError("auc: label/score length mismatch");
    const std::size_t m = y_true.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return positive_score[a] < positive_score[b]; });

    double rank_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < m;) {
        std::size_t j = i;
        while (j < m && positive_score[order[j]] == positive_score[order[i]]) ++j;
        // ranks i+1..j share their mean
        const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) {
            if (y_true[order[t]] == positive_class) {
                rank_sum += mid_rank;
                ++n_pos;
            }
        }
        i = j;
    }
    const std::size_t n_neg = m - n_pos;
    if (n_pos == 0 || n_neg == 0) return std::nullopt;
    const double np = static_cast<double>(n_pos);
    const double u = rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(n_neg));
}

std::optional<double> auc(std::span<const int> y_true, const Matrix& proba) {
    if (static_cast<std::size_t>(proba.rows()) != y_true.size()) throw DataError("auc: row count mismatch");
    const auto K = proba.cols();
    if (K < 2) throw DataError("auc: need at least two probability columns");
    std::vector<bool> present(static_cast<std::size_t>(K), false);
    for (int y : y_true) {
        if (y < 0 || y >= K) throw DataError("auc: label out of range");
        present[static_cast<std::size_t>(y)] = true;
    }
    if (std::count(present.begin(), present.end(), true) < 2) return std::nullopt;

    std::vector<double> column(y_true.size());
    auto column_auc = [&](Eigen::Index k) {
        for (std::size_t i = 0; i < column.size(); ++i) column[i] = proba(static_cast<Eigen::Index>(i), k);
        return binary_auc(y_true, column, static_cast<int>(k));
    };
    if (K == 2) return column_auc(1);

    double total = 0.0;
    int used = 0;
    for (Eigen::Index k = 0; k < K; ++k) {
        if (!present[static_cast<std::size_t>(k)]) continue;
        total += *column_auc(k);
        ++used;
    }
    return total / used;
}

void PerturbSpec::validate() const {
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] >= 0.0 && levels[i] <= 0.08)) throw ConfigError("perturbation levels must lie in [0, 0.08]");
        if (i > 0 && !(levels[i] > levels[i - 1])) throw ConfigError("perturbation levels must be strictly increasing");
    }
}

Matrix perturb(const Matrix& X, const TrainStats& stats, double level, std::uint64_t seed, PerturbMode mode) {
    if (!(level >= 0.0 && level <= 0.08)) throw ConfigError("perturbation level must lie in [0, 0.08]");
    if (stats.mean.size() != X.cols() || stats.variance.size() != X.cols()) {
        throw DataError("perturb: statistics dimension does not match the data");
    }
    if (level == 0.0) return X;

    Vector shift = level * stats.mean;
    Vector sd(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        sd(j) = mode == PerturbMode::ScaleVariance ? std::sqrt(level * stats.variance(j))
                                                   : level * std::sqrt(stats.variance(j));
    }
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix out = X;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) += shift(j) + sd(j) * normal(rng);
    }
    return out;
}

std::string Regime::name() const { return strategy ? to_string(*strategy) : "full"; }

Regime Regime::parse(const std::string& s) {
    if (s == "full") return full();
    return liit(parse_strategy(s));
}

std::uint64_t split_seed_for(std::uint64_t master, std::size_t dataset_index, int rerun) {
    return derive_seed({master, 0x59117ULL, dataset_index, static_cast<std::uint64_t>(rerun)});
}

std::uint64_t model_seed_for(std::uint64_t master, std::size_t dataset_index, const Regime& regime, int rerun) {
    const std::uint64_t regime_code = regime.strategy ? static_cast<std::uint64_t>(*regime.strategy) + 1 : 0;
    return derive_seed({master, 0x30de1ULL, dataset_index, regime_code, static_cast<std::uint64_t>(rerun)});
}

std::uint64_t perturb_seed_for(std::uint64_t master, std::size_t dataset_index, int rerun, std::size_t level_index) {
    return derive_seed({master, 0x9e27bULL, dataset_index, static_cast<std::uint64_t>(rerun), level_index});
}

namespace {

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t count = 0;
};

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd out;
    out.count = xs.size();
    if (xs.empty()) return out;
    for (double x : xs) out.mean += x;
    out.mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(xs.size()));
    return out;
}

struct Cell {
    std::size_t dataset = 0;
    std::size_t regime = 0;
    int rerun = 0;
};

RunRecord run_cell(const TabularDataset& ds, std::size_t dataset_index, const Regime& regime, int rerun,
                   const BenchmarkOptions& options) {
    RunRecord rec;
    rec.rerun = rerun;
    rec.split_seed = split_seed_for(options.master_seed, dataset_index, rerun);
    rec.model_seed = model_seed_for(options.master_seed, dataset_index, regime, rerun);
    const auto& levels = options.perturbation.levels;
    rec.perturbed_auc.assign(levels.size(), std::nullopt);
    try {
        const auto parts = split(ds, rec.split_seed);
        rec.n_train = parts.train.rows();

        LiitConfig cfg = options.liit;
        cfg.net.seed = rec.model_seed;
        cfg.sampler.seed = rec.model_seed;

        std::optional<DenseNet> net;
        if (regime.is_full()) {
            auto [trained, outcome] = train_full(parts, cfg);
            net.emplace(std::move(trained));
            rec.train_seconds = outcome.wall_seconds;
            rec.total_seconds = outcome.wall_seconds;
            rec.epochs_total = outcome.epochs_run;
            rec.epochs_per_iteration = {outcome.epochs_run};
        } else {
            cfg.strategy = *regime.strategy;
            auto [trained, trace] = train_liit(parts, cfg);
            net.emplace(std::move(trained));
            rec.lad_seconds = trace.lad_seconds;
            rec.total_seconds = trace.total_seconds;
            rec.train_seconds = trace.total_seconds - trace.lad_seconds;
            for (const auto& it : trace.iterations) {
                rec.epochs_per_iteration.push_back(it.epochs_run);
                rec.epochs_total += it.epochs_run;
            }
            rec.total_draws = trace.mts.total_draws;
            rec.mts_final_size = trace.mts.size();
        }

        rec.auc = auc(parts.test.labels, forward(*net, parts.test.features));
        const auto stats = train_stats(parts.train);
        for (std::size_t l = 0; l < levels.size(); ++l) {
            const auto noisy = perturb(parts.test.features, stats, levels[l],
                                       perturb_seed_for(options.master_seed, dataset_index, rerun, l),
                                       options.perturbation.mode);
            rec.perturbed_auc[l] = auc(parts.test.labels, forward(*net, noisy));
        }
        rec.ok = rec.auc.has_value();
        if (!rec.ok) rec.error = "test partition holds a single class; AUC undefined";
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
    }
    return rec;
}

}  // namespace

void aggregate(EvalReport& report, std::span<const double> levels) {
    std::vector<double> aucs, lad, train, total;
    for (const auto& r : report.runs) {
        if (!r.ok) continue;
        if (r.auc) aucs.push_back(*r.auc);
        lad.push_back(r.lad_seconds);
        train.push_back(r.train_seconds);
        total.push_back(r.total_seconds);
    }
    const auto a = mean_std(aucs);
    report.mean_auc = a.mean;
    report.std_auc = a.stddev;
    report.mean_lad_seconds = mean_std(lad).mean;
    report.mean_train_seconds = mean_std(train).mean;
    report.mean_total_seconds = mean_std(total).mean;

    report.curve.clear();
    for (std::size_t l = 0; l < levels.size(); ++l) {
        std::vector<double> vals;
        for (const auto& r : report.runs) {
            if (r.ok && l < r.perturbed_auc.size() && r.perturbed_auc[l]) vals.push_back(*r.perturbed_auc[l]);
        }
        const auto s = mean_std(vals);
        report.curve.push_back({levels[l], s.mean, s.stddev});
    }
}

std::vector<EvalReport> run_benchmark(std::span<const TabularDataset> datasets, std::span<const Regime> regimes,
                                      const BenchmarkOptions& options) {
    if (options.reruns < 1) throw ConfigError("bench: reruns must be >= 1");
    options.liit.validate();
    options.perturbation.validate();

    std::vector<Cell> cells;
    for (std::size_t d = 0; d < datasets.size(); ++d)
        for (int r = 0; r < options.reruns; ++r)
            for (std::size_t g = 0; g < regimes.size(); ++g) cells.push_back({d, g, r});

    std::vector<std::optional<RunRecord>> results(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex progress_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            if (options.stop && options.stop->load()) continue;
            const auto& c = cells[i];
            results[i] = run_cell(datasets[c.dataset], c.dataset, regimes[c.regime], c.rerun, options);
            if (options.progress) {
                std::lock_guard lock(progress_mutex);
                const auto& rec = *results[i];
                std::string msg = datasets[c.dataset].name + " / " + regimes[c.regime].name() + " / rerun " +
                                  std::to_string(c.rerun) + ": ";
                msg += rec.ok ? "auc " + std::to_string(*rec.auc) : "failed: " + rec.error;
                options.progress(msg);
            }
        }
    };
    const int jobs = std::max(1, options.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    }

    std::vector<EvalReport> reports;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        for (std::size_t g = 0; g < regimes.size(); ++g) {
            EvalReport rep;
            rep.dataset = datasets[d].name;
            rep.regime = regimes[g].name();
            for (std::size_t i = 0; i < cells.size(); ++i) {
                const auto& c = cells[i];
                if (c.dataset != d || c.regime != g) continue;
                rep.rerun_seeds.push_back(model_seed_for(options.master_seed, d, regimes[g], c.rerun));
                if (!results[i]) {
                    rep.complete = false;
                    rep.failures.push_back("rerun " + std::to_string(c.rerun) + ": not run (interrupted)");
                    continue;
                }
                if (!results[i]->ok) {
                    rep.complete = false;
                    rep.failures.push_back("rerun " + std::to_string(c.rerun) + ": " + results[i]->error);
                }
                rep.runs.push_back(std::move(*results[i]));
            }
            aggregate(rep, options.perturbation.levels);
            reports.push_back(std::move(rep));
        }
    }
    return reports;
}

}  // namespace liit
