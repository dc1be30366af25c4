#include "lrbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include "lrbench/errors.hpp"
#include "lrbench/loss.hpp"
#include "lrbench/mlp.hpp"
#include "lrbench/rng.hpp"

namespace lrbench {

void RunConfig::validate() const {
    if (epochs < 1) throw ConfigError("RunConfig: epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("RunConfig: batch_size must be >= 1");
    data.validate();
    std::visit([](const auto& c) { c.validate(); }, strategy);
}

RunConfig benchmark_run(std::string_view name, const Defaults& defaults) {
    RunConfig cfg;
    cfg.strategy = strategy_spec(name, defaults);
    return cfg;
}

std::vector<double> RunHistory::accuracy_trace() const {
    std::vector<double> acc;
    acc.reserve(epochs.size());
    for (const auto& e : epochs) acc.push_back(e.test_accuracy);
    return acc;
}

namespace {

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

bool same_trace(const std::vector<DalsTraceRow>& a, const std::vector<DalsTraceRow>& b) {
    if (a.size() != b.size()) return false;
    auto same_vec = [](const std::vector<double>& x, const std::vector<double>& y) {
        return x.size() == y.size() && std::equal(x.begin(), x.end(), y.begin(), same_bits);
    };
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].step != b[i].step || a[i].phase != b[i].phase || !same_bits(a[i].lr, b[i].lr) ||
            !same_vec(a[i].alpha, b[i].alpha) || !same_vec(a[i].trust, b[i].trust)) {
            return false;
        }
    }
    return true;
}

}  // namespace

bool same_results(const RunHistory& a, const RunHistory& b) {
    if (a.strategy != b.strategy || a.epochs.size() != b.epochs.size()) return false;
    for (std::size_t i = 0; i < a.epochs.size(); ++i) {
        const auto& x = a.epochs[i];
        const auto& y = b.epochs[i];
        if (!same_bits(x.train_loss, y.train_loss) || !same_bits(x.test_loss, y.test_loss) ||
            !same_bits(x.test_accuracy, y.test_accuracy) || !same_bits(x.mean_lr, y.mean_lr)) {
            return false;
        }
    }
    return same_bits(a.best_accuracy, b.best_accuracy) && a.threshold_epochs == b.threshold_epochs &&
           same_trace(a.trace, b.trace);
}

RunFailure::RunFailure(std::string strategy, std::size_t epoch, std::int64_t step, const std::string& what)
    : std::runtime_error(strategy + " failed in epoch " + std::to_string(epoch) + " at step " +
                         std::to_string(step) + ": " + what),
      strategy_(std::move(strategy)),
      epoch_(epoch),
      step_(step) {}

std::vector<std::optional<std::size_t>> epochs_to_threshold(std::span<const double> accuracy,
                                                            std::span<const double> thresholds) {
    std::vector<std::optional<std::size_t>> out(thresholds.size());
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        for (std::size_t e = 0; e < accuracy.size(); ++e) {
            if (accuracy[e] >= thresholds[k]) {
                out[k] = e + 1;
                break;
            }
        }
    }
    return out;
}

RunHistory train_run(const RunConfig& cfg) {
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();

    const Dataset data = generate(cfg.data);
    Model model = init_model(cfg.seed);
    const std::size_t n_train = data.train_x.rows();
    const std::size_t dim = data.train_x.cols();
    const auto steps_per_epoch = static_cast<std::int64_t>((n_train + cfg.batch_size - 1) / cfg.batch_size);
    const TrainingHorizon horizon{static_cast<std::int64_t>(cfg.epochs) * steps_per_epoch, steps_per_epoch};

    auto optimizer = build_optimizer(cfg.strategy, model.n_layers(), horizon);
    RunHistory history;
    history.strategy = std::string(spec_name(cfg.strategy));
    if (cfg.trace) {
        if (auto* dals = dynamic_cast<DalsOptimizer*>(optimizer.get())) {
            history.trace.reserve(static_cast<std::size_t>(horizon.total_steps));
            dals->set_trace(&history.trace);
        }
    }

    Matrix batch_x;
    std::vector<std::size_t> batch_y;
    const GradientOracle regrad = [&batch_x, &batch_y](Model& m) {
        const auto fwd = forward(m, batch_x);
        const auto xent = softmax_xent(fwd.logits, batch_y);
        backward(m, fwd.cache, xent.dlogits);
        return xent.loss;
    };

    const RngStream base(cfg.seed);
    std::vector<std::size_t> order(n_train);
    const std::size_t top_layer = model.n_layers() - 1;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        RngStream shuffle = base.derive("shuffle", epoch);
        for (std::size_t i = n_train; i > 1; --i) {
            std::swap(order[i - 1], order[shuffle.uniform_index(i)]);
        }

        double loss_sum = 0.0;
        double lr_sum = 0.0;
        std::size_t seen = 0;
        std::int64_t steps = 0;
        for (std::size_t start = 0; start < n_train; start += cfg.batch_size) {
            const std::size_t count = std::min(cfg.batch_size, n_train - start);
            if (batch_x.rows() != count) batch_x = Matrix(count, dim);
            batch_y.resize(count);
            for (std::size_t r = 0; r < count; ++r) {
                const auto src = data.train_x.row(order[start + r]);
                std::copy(src.begin(), src.end(), batch_x.row(r).begin());
                batch_y[r] = data.train_y[order[start + r]];
            }
            const std::int64_t t = optimizer->steps_taken();
            try {
                const double loss = regrad(model);
                lr_sum += optimizer->learning_rate(top_layer, t);
                optimizer->step(model, regrad, loss);
                loss_sum += loss * static_cast<double>(count);
            } catch (const StrategyAbort& e) {
                throw RunFailure(history.strategy, epoch + 1, t, e.what());
            } catch (const ConfigError& e) {
                throw RunFailure(history.strategy, epoch + 1, t, e.what());
            }
            seen += count;
            ++steps;
        }

        EpochRecord rec;
        rec.train_loss = loss_sum / static_cast<double>(seen);
        rec.mean_lr = lr_sum / static_cast<double>(steps);
        rec.test_accuracy = std::nan("");
        rec.test_loss = std::nan("");
        if (cfg.eval_each_epoch || epoch + 1 == cfg.epochs) {
            const auto eval = evaluate(model, data.test_x, data.test_y);
            rec.test_accuracy = eval.accuracy;
            rec.test_loss = eval.loss;
        }
        history.epochs.push_back(rec);
    }

    history.best_accuracy = 0.0;
    for (const auto& e : history.epochs) {
        if (!std::isnan(e.test_accuracy)) history.best_accuracy = std::max(history.best_accuracy, e.test_accuracy);
    }
    const auto crossings = epochs_to_threshold(history.accuracy_trace());
    std::copy(crossings.begin(), crossings.end(), history.threshold_epochs.begin());
    if (auto* dals = dynamic_cast<DalsOptimizer*>(optimizer.get())) dals->set_trace(nullptr);
    history.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return history;
}

bool BenchmarkReport::all_succeeded() const {
    return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.history.has_value(); });
}

BenchmarkReport run_benchmark(std::span<const RunConfig> runs, std::size_t workers) {
    BenchmarkReport report;
    report.rows.resize(runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto name = spec_name(runs[i].strategy);
        report.rows[i].strategy = std::string(name);
        report.rows[i].generation =
            is_known_strategy(name) ? std::string(roster_entry(name).generation) : "custom";
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < runs.size(); i = next.fetch_add(1)) {
            try {
                report.rows[i].history = train_run(runs[i]);
            } catch (const std::exception& e) {
                report.rows[i].error = e.what();
            }
        }
    };

    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(runs.size(), 1));
    if (workers == 1) {
        worker();
        return report;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    pool.clear();
    return report;
}

}  // namespace lrbench
