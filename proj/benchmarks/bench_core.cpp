#include <liit/dataset.hpp>
#include <liit/dense_net.hpp>
#include <liit/evaluation.hpp>
#include <liit/lad.hpp>
#include <liit/random.hpp>
#include <liit/sampler.hpp>

#include <benchmark/benchmark.h>

using namespace liit;

static void BM_LadScores(benchmark::State& state) {
    const auto ds = make_blobs(static_cast<std::size_t>(state.range(0)), 10, 4, 2.0, 1);
    const LadConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(lad_scores_by_class(ds, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LadScores)->Arg(1000)->Arg(16000);

static void BM_Forward(benchmark::State& state) {
    const auto ds = make_blobs(static_cast<std::size_t>(state.range(0)), 10, 4, 2.0, 2);
    NetConfig cfg;
    cfg.input_dim = 10;
    cfg.output_dim = 4;
    cfg.seed = 2;
    const DenseNet net(cfg);
    for (auto _ : state) benchmark::DoNotOptimize(forward(net, ds.features));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(32)->Arg(2000)->Arg(16000);

static void BM_TrainEpoch(benchmark::State& state) {
    const auto ds = make_blobs(static_cast<std::size_t>(state.range(0)), 10, 4, 2.0, 3);
    NetConfig cfg;
    cfg.input_dim = 10;
    cfg.output_dim = 4;
    cfg.max_epochs = 1;
    cfg.seed = 3;
    DenseNet net(cfg);
    const TabularDataset none;
    for (auto _ : state) benchmark::DoNotOptimize(train_batches(net, ds, none, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainEpoch)->Arg(1000)->Arg(16000)->Unit(benchmark::kMillisecond);

static void BM_Auc(benchmark::State& state) {
    const auto m = static_cast<Eigen::Index>(state.range(0));
    Rng rng(4);
    std::vector<int> y(static_cast<std::size_t>(m));
    for (auto& v : y) v = static_cast<int>(rng() % 4);
    const Matrix proba = Matrix::Random(m, 4).cwiseAbs();
    for (auto _ : state) benchmark::DoNotOptimize(auc(y, proba));
}
BENCHMARK(BM_Auc)->Arg(2000);

static void BM_UpdateMts(benchmark::State& state) {
    const auto ds = make_blobs(16000, 10, 4, 2.0, 5);
    const auto scores = lad_scores_by_class(ds, LadConfig{});
    SamplerConfig cfg{220, 5};
    std::vector<std::vector<RowIndex>> wrong(4);
    for (RowIndex i = 0; i < ds.rows(); i += 7) wrong[static_cast<std::size_t>(ds.labels[i])].push_back(i);
    const auto strategy = static_cast<Strategy>(state.range(0));
    for (auto _ : state) {
        auto mts = init_mts(scores, ds.labels, 4, strategy, cfg);
        update_mts(mts, wrong, scores, strategy, cfg, 1);
        benchmark::DoNotOptimize(mts);
    }
    state.SetLabel(to_string(strategy));
}
BENCHMARK(BM_UpdateMts)->DenseRange(0, 4);
BENCHMARK_MAIN();
