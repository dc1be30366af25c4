#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lrbench/errors.hpp"
#include "lrbench/harness.hpp"

using namespace lrbench;

namespace {

using Crossings = std::vector<std::optional<std::size_t>>;

/// Small protocol so whole runs take well under a second.
RunConfig quick(std::string_view name, std::size_t epochs = 2) {
    RunConfig cfg = benchmark_run(name);
    cfg.epochs = epochs;
    cfg.data.n_samples = 1200;
    return cfg;
}

}  // namespace

TEST_CASE("threshold crossings scan for the first epoch at or above each level") {
    const std::vector<double> trace{0.5, 0.65, 0.92};
    CHECK(epochs_to_threshold(trace) == Crossings{2, 3, 3, 3});

    const std::vector<double> jump{0.1, 0.2, 0.95, 0.97};
    CHECK(epochs_to_threshold(jump) == Crossings{3, 3, 3, 3});

    const std::vector<double> flat(10, 0.5);
    CHECK(epochs_to_threshold(flat) == Crossings(4));

    const std::vector<double> exact{0.6, 0.7, 0.8, 0.9};
    CHECK(epochs_to_threshold(exact) == Crossings{1, 2, 3, 4});

    const std::vector<double> dip{0.95, 0.1, 0.2};
    CHECK(epochs_to_threshold(dip) == Crossings{1, 1, 1, 1});

    CHECK(epochs_to_threshold(std::vector<double>{}) == Crossings(4));
    const std::vector<double> custom{0.2};
    CHECK(epochs_to_threshold(trace, custom) == Crossings{1});
    // NaN epochs (not evaluated) never count as a crossing
    const std::vector<double> gaps{NAN, 0.95};
    CHECK(epochs_to_threshold(gaps) == Crossings{2, 2, 2, 2});
}

TEST_CASE("the same config yields a bit-identical history") {
    for (const char* name : {"sam", "dals", "lookahead_adamw"}) {
        auto cfg = quick(name);
        cfg.trace = true;
        const auto a = train_run(cfg);
        const auto b = train_run(cfg);
        INFO(name);
        CHECK(same_results(a, b));
        CHECK(a.wall_seconds >= 0.0);
    }
}

TEST_CASE("different seeds give different histories") {
    auto cfg = quick("adam");
    const auto a = train_run(cfg);
    cfg.seed = 7;
    CHECK_FALSE(same_results(a, train_run(cfg)));
}

TEST_CASE("history bookkeeping") {
    auto cfg = quick("cosine_sgd", 3);
    const auto h = train_run(cfg);
    CHECK(h.strategy == "cosine_sgd");
    REQUIRE(h.epochs.size() == 3);
    double best = 0.0;
    for (const auto& e : h.epochs) {
        CHECK(std::isfinite(e.train_loss));
        CHECK(e.test_accuracy >= 0.0);
        CHECK(e.test_accuracy <= 1.0);
        best = std::max(best, e.test_accuracy);
    }
    CHECK(h.best_accuracy == best);
    const auto crossings = epochs_to_threshold(h.accuracy_trace());
    CHECK(std::equal(crossings.begin(), crossings.end(), h.threshold_epochs.begin()));
    // cosine: the mean rate falls epoch over epoch
    CHECK(h.epochs[0].mean_lr > h.epochs[1].mean_lr);
    CHECK(h.epochs[1].mean_lr > h.epochs[2].mean_lr);
    CHECK(h.trace.empty());
}

TEST_CASE("skipping evaluation leaves NaN except for the last epoch") {
    auto cfg = quick("fixed_sgd", 3);
    cfg.eval_each_epoch = false;
    const auto h = train_run(cfg);
    CHECK(std::isnan(h.epochs[0].test_accuracy));
    CHECK(std::isnan(h.epochs[1].test_accuracy));
    CHECK(h.best_accuracy == h.epochs[2].test_accuracy);
}

TEST_CASE("dals runs can record a per-step trace") {
    auto cfg = quick("dals_fast", 1);
    cfg.trace = true;
    const auto h = train_run(cfg);
    // 960 training samples in batches of 64
    REQUIRE(h.trace.size() == 15);
    for (std::size_t i = 0; i < h.trace.size(); ++i) CHECK(h.trace[i].step == static_cast<std::int64_t>(i));
    CHECK(h.trace[0].phase == Phase::exploration);
    CHECK(h.trace[0].trust.size() == 6);
}

TEST_CASE("a partial last batch is kept") {
    auto cfg = quick("dals", 1);
    cfg.batch_size = 100;
    cfg.trace = true;
    CHECK(train_run(cfg).trace.size() == 10);
}

TEST_CASE("invalid run configurations are rejected") {
    auto cfg = quick("adam");
    cfg.epochs = 0;
    CHECK_THROWS_AS(train_run(cfg), ConfigError);
    cfg = quick("adam");
    cfg.batch_size = 0;
    CHECK_THROWS_AS(train_run(cfg), ConfigError);
    cfg = quick("adam");
    std::get<StrategyConfig>(cfg.strategy).lr = -1.0;
    CHECK_THROWS_AS(train_run(cfg), ConfigError);
}

TEST_CASE("a diverging strategy fails with context") {
    auto cfg = quick("fixed_sgd");
    std::get<StrategyConfig>(cfg.strategy).lr = 1e200;
    try {
        train_run(cfg);
        FAIL("expected a failure");
    } catch (const RunFailure& e) {
        CHECK(e.strategy() == "fixed_sgd");
        CHECK(e.epoch() == 1);
        CHECK(e.step() >= 0);
    }
}

TEST_CASE("benchmark rows follow input order and isolate failures") {
    std::vector<RunConfig> runs{quick("adam", 1), quick("fixed_sgd", 1), quick("dals", 1)};
    std::get<StrategyConfig>(runs[1].strategy).lr = 1e200;
    const auto report = run_benchmark(runs);
    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[0].strategy == "adam");
    CHECK(report.rows[0].generation == "Gen 3");
    CHECK(report.rows[0].history.has_value());
    CHECK_FALSE(report.rows[1].history.has_value());
    CHECK(report.rows[1].error.find("fixed_sgd") != std::string::npos);
    CHECK(report.rows[2].history.has_value());
    CHECK_FALSE(report.all_succeeded());
}

TEST_CASE("empty roster gives an empty report") {
    const auto report = run_benchmark(std::span<const RunConfig>{});
    CHECK(report.rows.empty());
    CHECK(report.all_succeeded());
    CHECK(run_benchmark(std::span<const RunConfig>{}, 4).rows.empty());
}

TEST_CASE("dals roster yields three rows with four threshold columns") {
    std::vector<RunConfig> runs{quick("dals"), quick("dals_fast"), quick("dals_acc")};
    const auto report = run_benchmark(runs);
    REQUIRE(report.rows.size() == 3);
    for (const auto& row : report.rows) {
        REQUIRE(row.history.has_value());
        CHECK(row.generation == "SOTA");
        CHECK(row.history->threshold_epochs.size() == 4);
    }
}

TEST_CASE("parallel and sequential benchmarks agree") {
    std::vector<RunConfig> runs;
    for (const char* name : {"fixed_sgd", "adamw", "lion", "sam_discriminative", "dals_acc"}) {
        runs.push_back(quick(name, 1));
    }
    runs.back().trace = true;
    const auto seq = run_benchmark(runs, 1);
    const auto par = run_benchmark(runs, 3);
    REQUIRE(seq.rows.size() == par.rows.size());
    for (std::size_t i = 0; i < seq.rows.size(); ++i) {
        INFO(seq.rows[i].strategy);
        CHECK(seq.rows[i].strategy == par.rows[i].strategy);
        REQUIRE(seq.rows[i].history.has_value());
        REQUIRE(par.rows[i].history.has_value());
        CHECK(same_results(*seq.rows[i].history, *par.rows[i].history));
    }
}
