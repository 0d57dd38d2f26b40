#include <doctest.h>

#include "oracles/sampler_properties.hpp"

#include <liit/error.hpp>
#include <liit/sampler.hpp>

#include <sstream>

using namespace liit;

namespace {

ScoreVector make_scores(std::vector<double> s) {
    ScoreVector out;
    out.flags.assign(s.size(), 0);
    out.scores = std::move(s);
    return out;
}

}  // namespace

TEST_CASE("derive_c_size") {
    CHECK(derive_c_size(1000, 2) == 28);
    CHECK(derive_c_size(100, 26) == 1);
    CHECK(derive_c_size(1848, 7) == 15);
    CHECK(derive_c_size(0, 3) == 1);
    CHECK_THROWS_AS(derive_c_size(10, 0), ConfigError);
}

TEST_CASE("strategy names round-trip") {
    for (auto s : kAllStrategies) CHECK(parse_strategy(to_string(s)) == s);
    CHECK_THROWS_AS(parse_strategy("boosting"), ConfigError);
}

TEST_CASE("init_mts takes the lowest scores per class") {
    const auto scores = make_scores({0.9, 0.1, 0.5, 0.0});
    const std::vector<int> labels{0, 0, 0, 0};
    const SamplerConfig cfg{2, 1};
    const auto mts = init_mts(scores, labels, 1, Strategy::AnomalyRepeated, cfg);
    CHECK(mts.indices == std::vector<RowIndex>{3, 1});
    for (auto s : {Strategy::AnomalyNormalUnique, Strategy::AnomalyUnique, Strategy::QuantileRepeated}) {
        CHECK(init_mts(scores, labels, 1, s, cfg).indices == mts.indices);
    }
}

TEST_CASE("init_mts: small classes contribute everything; Random is seeded") {
    const auto scores = make_scores({0.3, 0.2, 0.1, 0.5, 0.4, 0.6, 0.7});
    const std::vector<int> labels{0, 0, 0, 1, 1, 1, 1};
    const SamplerConfig cfg{3, 3};
    const auto det = init_mts(scores, labels, 2, Strategy::AnomalyUnique, cfg);
    CHECK(det.indices == std::vector<RowIndex>{2, 1, 0, 4, 3, 5});

    const auto r1 = init_mts(scores, labels, 2, Strategy::Random, cfg);
    const auto r2 = init_mts(scores, labels, 2, Strategy::Random, cfg);
    CHECK(r1.indices == r2.indices);
    CHECK(r1.indices.size() == 6);

    CHECK_THROWS_AS(init_mts(scores, labels, 0, Strategy::Random, cfg), DataError);
    CHECK_THROWS_AS(init_mts(make_scores({0.1}), labels, 2, Strategy::Random, cfg), DataError);
}

TEST_CASE("update: AnomalyRepeated appends the highest-score misclassified rows") {
    const auto scores = make_scores({0.2, 0.9, 0.4, 0.0});
    MtsSample mts;
    const std::vector<std::vector<RowIndex>> wrong{{0, 1, 2}};
    update_mts(mts, wrong, scores, Strategy::AnomalyRepeated, {2, 0}, 1);
    CHECK(mts.indices == std::vector<RowIndex>{1, 2});
    update_mts(mts, wrong, scores, Strategy::AnomalyRepeated, {2, 0}, 2);
    CHECK(mts.indices == std::vector<RowIndex>{1, 2, 1, 2});
}

TEST_CASE("update: QuantileRepeated picks rows nearest evenly spaced quantiles") {
    const auto scores = make_scores({0.5, 0.0, 1.0, 0.25, 0.75});
    MtsSample mts;
    const std::vector<std::vector<RowIndex>> wrong{{0, 1, 2, 3, 4}};
    update_mts(mts, wrong, scores, Strategy::QuantileRepeated, {3, 0}, 1);
    CHECK(mts.indices == std::vector<RowIndex>{1, 0, 2});
}

TEST_CASE("update: QuantileRepeated may repeat a row within one draw") {
    const auto scores = make_scores({0.0, 0.0, 0.0, 1.0});
    MtsSample mts;
    const std::vector<std::vector<RowIndex>> wrong{{0, 1, 2, 3}};
    update_mts(mts, wrong, scores, Strategy::QuantileRepeated, {3, 0}, 1);
    // targets 0, 0, 1 -> nearest row with lowest index for ties
    CHECK(mts.indices == std::vector<RowIndex>{0, 0, 3});
}

TEST_CASE("update: AnomalyUnique grows by c_size - 1 when the top row is present") {
    const auto scores = make_scores({0.1, 0.8, 0.9, 0.7, 0.2});
    MtsSample mts;
    mts.indices = {2};
    mts.provenance.push_back({0, 0, {2}});
    const std::vector<std::vector<RowIndex>> wrong{{1, 2, 3, 4}};
    update_mts(mts, wrong, scores, Strategy::AnomalyUnique, {3, 0}, 1);
    CHECK(mts.size() == 3);
    CHECK(mts.indices == std::vector<RowIndex>{2, 1, 3});
}

TEST_CASE("update: AnomalyNormalUnique splits low/high with the extra slot high") {
    const auto scores = make_scores({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7});
    MtsSample mts;
    const std::vector<std::vector<RowIndex>> wrong{{0, 1, 2, 3, 4, 5, 6}};
    update_mts(mts, wrong, scores, Strategy::AnomalyNormalUnique, {3, 0}, 1);
    CHECK(mts.indices == std::vector<RowIndex>{0, 6, 5});
    update_mts(mts, wrong, scores, Strategy::AnomalyNormalUnique, {3, 0}, 2);
    CHECK(mts.indices == std::vector<RowIndex>{0, 6, 5});
}

TEST_CASE("update: empty and short misclassified sets") {
    const auto scores = make_scores({0.1, 0.2, 0.3, 0.4});
    MtsSample mts;
    const std::vector<std::vector<RowIndex>> wrong{{}, {2, 3}};
    for (auto s : kAllStrategies) {
        MtsSample m;
        update_mts(m, wrong, scores, s, {5, 9}, 1);
        CHECK(m.size() == 2);
        CHECK(m.provenance.size() == 1);
        CHECK(m.provenance[0].class_id == 1);
    }
}

TEST_CASE("update: ties break by ascending row index") {
    const auto scores = make_scores({0.5, 0.5, 0.5, 0.5});
    MtsSample mts;
    const std::vector<std::vector<RowIndex>> wrong{{3, 2, 1, 0}};
    update_mts(mts, wrong, scores, Strategy::AnomalyRepeated, {2, 0}, 1);
    CHECK(mts.indices == std::vector<RowIndex>{0, 1});
}

TEST_CASE("provenance CSV lists every appended row") {
    const auto scores = make_scores({0.1, 0.2, 0.3, 0.4});
    auto mts = init_mts(scores, std::vector<int>{0, 0, 1, 1}, 2, Strategy::AnomalyRepeated, {1, 0});
    const std::vector<std::vector<RowIndex>> wrong{{1}, {3}};
    update_mts(mts, wrong, scores, Strategy::AnomalyRepeated, {1, 0}, 1);
    std::ostringstream out;
    write_provenance_csv(mts, out);
    CHECK(out.str() == "iteration,class,row_index\n0,0,0\n0,1,2\n1,0,1\n1,1,3\n");
}

TEST_CASE("sampler invariants over random cases") {
    const auto sweep = oracle::sampler_property_sweep(300, 17);
    for (const auto& m : sweep.messages) INFO(m);
    CHECK(sweep.violations == 0);
}
