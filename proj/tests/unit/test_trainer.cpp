#include <doctest.h>

#include <liit/error.hpp>
#include <liit/trainer.hpp>

#include <json.hpp>

#include <set>

using namespace liit;

namespace {

SplitDataset blobs_split(std::size_t n = 600, int K = 3, double spread = 1.0, std::uint64_t seed = 1) {
    return split(make_blobs(n, 4, K, spread, seed), seed);
}

LiitConfig fast_config(Strategy s, std::uint64_t seed = 3) {
    LiitConfig cfg;
    cfg.strategy = s;
    cfg.net.seed = seed;
    cfg.sampler.seed = seed;
    return cfg;
}

double accuracy(const DenseNet& net, const TabularDataset& ds) {
    const auto pred = predict(net, ds.features);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == ds.labels[i];
    return static_cast<double>(ok) / static_cast<double>(pred.size());
}

}  // namespace

TEST_CASE("mts_budget arithmetic") {
    LiitConfig cfg;
    cfg.sampler.c_size = 6;
    CHECK(mts_budget(cfg, 800, 8) == 288);
    cfg.iterations = 1;
    CHECK(mts_budget(cfg, 800, 8) == 48);

    LiitConfig defaults;
    // 0.055 * 4000 / 2 = 110 per class, 6 rounds -> 1320 = 0.33 * 4000
    CHECK(mts_budget(defaults, 4000, 2) == 1320);
}

TEST_CASE("train_full on blobs") {
    const auto parts = blobs_split();
    auto cfg = fast_config(Strategy::Random);
    auto [net, outcome] = train_full(parts, cfg);
    CHECK(outcome.epochs_run <= 180);
    CHECK(accuracy(net, parts.test) >= 0.95);

    auto [net2, outcome2] = train_full(parts, cfg);
    CHECK(outcome2.epochs_run == outcome.epochs_run);
    CHECK(outcome2.train_loss == outcome.train_loss);
    CHECK(outcome2.validation_loss == outcome.validation_loss);
    CHECK(net2.params.w2 == net.params.w2);
}

TEST_CASE("train_liit on blobs for every strategy") {
    const auto parts = blobs_split(1200, 3, 1.5, 2);
    for (auto s : kAllStrategies) {
        CAPTURE(to_string(s));
        auto [net, trace] = train_liit(parts, fast_config(s));
        CHECK(accuracy(net, parts.train) >= 0.95);
        CHECK(trace.mts.distinct() <= static_cast<std::size_t>(0.40 * static_cast<double>(parts.train.rows())));
        CHECK(trace.mts.total_draws <= mts_budget(fast_config(s), parts.train.rows(), 3));
        CHECK(trace.iterations.size() <= 6);
        for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
            CHECK(trace.iterations[i].epochs_run <= 30);
            if (i > 0) CHECK(trace.iterations[i].mts_size >= trace.iterations[i - 1].mts_size);
        }
        CHECK(net.epochs_trained == [&] {
            int total = 0;
            for (const auto& r : trace.iterations) total += r.epochs_run;
            return total;
        }());
    }
}

TEST_CASE("train_liit stops after the first round when nothing is misclassified") {
    const auto parts = split(make_blobs(300, 2, 2, 0.05, 4), 4);
    auto cfg = fast_config(Strategy::AnomalyRepeated);
    cfg.sampler.c_size = 20;
    auto [net, trace] = train_liit(parts, cfg);
    REQUIRE(trace.iterations.size() == 1);
    CHECK(trace.iterations[0].misclassified_per_class == std::vector<std::size_t>{0, 0});
    CHECK(trace.mts.provenance.size() == 2);
    CHECK(trace.mts.size() == 40);
}

TEST_CASE("misclassified sets are exactly the wrong predictions") {
    TabularDataset ds;
    ds.num_classes = 3;
    ds.features = Matrix::Zero(5, 1);
    ds.labels = {0, 1, 2, 1, 0};
    const auto wrong = misclassified_by_class({0, 2, 2, 1, 1}, ds);
    CHECK(wrong[0] == std::vector<RowIndex>{4});
    CHECK(wrong[1] == std::vector<RowIndex>{1});
    CHECK(wrong[2].empty());
}

TEST_CASE("strategies share the trace schema and differ in sample contents") {
    const auto parts = blobs_split(900, 3, 3.0, 5);
    auto [n1, random] = train_liit(parts, fast_config(Strategy::Random));
    auto [n2, anomaly] = train_liit(parts, fast_config(Strategy::AnomalyRepeated));
    const auto jr = nlohmann::json::parse(trace_to_json(random, fast_config(Strategy::Random)));
    const auto ja = nlohmann::json::parse(trace_to_json(anomaly, fast_config(Strategy::AnomalyRepeated)));
    std::set<std::string> kr, ka;
    for (auto& [k, v] : jr.items()) kr.insert(k);
    for (auto& [k, v] : ja.items()) ka.insert(k);
    CHECK(kr == ka);
    CHECK(jr["iterations"][0].size() == ja["iterations"][0].size());
    CHECK(random.mts.indices != anomaly.mts.indices);
    CHECK(jr["strategy"] == "random");
}

TEST_CASE("train_liit is deterministic") {
    const auto parts = blobs_split(500, 2, 3.0, 6);
    const auto cfg = fast_config(Strategy::QuantileRepeated, 11);
    auto [a, ta] = train_liit(parts, cfg);
    auto [b, tb] = train_liit(parts, cfg);
    CHECK(trace_to_json(ta, cfg) == trace_to_json(tb, cfg));
    CHECK(a.params.w1 == b.params.w1);
}

TEST_CASE("config JSON round-trip and validation") {
    LiitConfig cfg;
    cfg.iterations = 4;
    cfg.strategy = Strategy::AnomalyUnique;
    cfg.lad.divisor = LadDivisor::StdDev;
    cfg.lad.scope = ScoringScope::Global;
    cfg.net.hidden1 = 12;
    const auto back = config_from_json(config_to_json(cfg));
    CHECK(back.iterations == 4);
    CHECK(back.strategy == Strategy::AnomalyUnique);
    CHECK(back.lad.divisor == LadDivisor::StdDev);
    CHECK(back.lad.scope == ScoringScope::Global);
    CHECK(back.net.hidden1 == 12);
    CHECK_THROWS_AS(config_from_json("{\"strategy\": \"nope\"}"), ConfigError);

    LiitConfig bad;
    bad.iterations = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
