#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrbench/dals.hpp"
#include "lrbench/registry.hpp"
#include "lrbench/synthdata.hpp"

namespace lrbench {

inline constexpr std::array<double, 4> kAccuracyThresholds{0.60, 0.70, 0.80, 0.90};

struct RunConfig {
    StrategySpec strategy = StrategyConfig{};
    std::size_t epochs = 80;
    std::size_t batch_size = 64;
    DataConfig data{};
    std::uint64_t seed = 42;  ///< weight init and shuffling
    bool eval_each_epoch = true;
    bool trace = false;       ///< collect per-step rows (DALS family only)

    void validate() const;
};

/// Convenience: roster strategy `name` under the default protocol.
RunConfig benchmark_run(std::string_view name, const Defaults& defaults = Defaults{});

struct EpochRecord {
    double train_loss = 0.0;     ///< mean batch loss over the epoch
    double test_loss = 0.0;
    double test_accuracy = 0.0;  ///< NaN when the epoch was not evaluated
    double mean_lr = 0.0;        ///< mean top-layer learning rate over the epoch's steps
};

struct RunHistory {
    std::string strategy;
    std::vector<EpochRecord> epochs;
    double best_accuracy = 0.0;
    std::array<std::optional<std::size_t>, kAccuracyThresholds.size()> threshold_epochs{};
    double wall_seconds = 0.0;
    std::vector<DalsTraceRow> trace;

    std::vector<double> accuracy_trace() const;
};

/// Bitwise equality of everything except wall time.
bool same_results(const RunHistory& a, const RunHistory& b);

/// A run stopped early; names the strategy, epoch (1-based) and step.
class RunFailure : public std::runtime_error {
public:
    RunFailure(std::string strategy, std::size_t epoch, std::int64_t step, const std::string& what);
    const std::string& strategy() const noexcept { return strategy_; }
    std::size_t epoch() const noexcept { return epoch_; }
    std::int64_t step() const noexcept { return step_; }

private:
    std::string strategy_;
    std::size_t epoch_;
    std::int64_t step_;
};

/// Deterministic training run. Throws ConfigError for invalid configs and
/// RunFailure when the strategy aborts.
RunHistory train_run(const RunConfig& cfg);

/// First epoch (1-based) whose accuracy reaches each threshold, or empty.
std::vector<std::optional<std::size_t>> epochs_to_threshold(
    std::span<const double> accuracy, std::span<const double> thresholds = kAccuracyThresholds);

struct BenchmarkRow {
    std::string strategy;
    std::string generation;
    std::optional<RunHistory> history;  ///< empty when the run failed
    std::string error;
};

struct BenchmarkReport {
    std::vector<BenchmarkRow> rows;
    bool all_succeeded() const;
};

/// Runs every config, `workers` at a time. Rows follow roster order and a
/// failing run is recorded in its row without stopping the others.
BenchmarkReport run_benchmark(std::span<const RunConfig> runs, std::size_t workers = 1);

}  // namespace lrbench
