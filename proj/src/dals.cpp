#include "lrbench/dals.hpp"

#include <algorithm>
#include <cmath>

#include "lrbench/errors.hpp"
#include "lrbench/strategies.hpp"

namespace lrbench {

Phase PhaseDetector::classify(double improvement) const noexcept {
    if (improvement > settings_.explore_threshold) return Phase::exploration;
    if (improvement > settings_.refine_threshold) return Phase::exploitation;
    return Phase::refinement;
}

Phase PhaseDetector::update(double batch_loss) {
    if (!std::isfinite(batch_loss)) throw ConfigError("PhaseDetector: non-finite loss");
    if (!ema_) {
        ema_ = batch_loss;
        phase_ = Phase::exploration;
        return phase_;
    }
    const double previous = *ema_;
    const double current = settings_.ema_decay * previous + (1.0 - settings_.ema_decay) * batch_loss;
    ema_ = current;
    improvement_ = previous == 0.0 ? 0.0 : (previous - current) / std::abs(previous);
    phase_ = classify(*improvement_);
    return phase_;
}

std::string_view to_string(DalsVariant variant) {
    switch (variant) {
        case DalsVariant::base: return "base";
        case DalsVariant::fast: return "fast";
        case DalsVariant::acc: return "acc";
    }
    return "unknown";
}

DalsConfig DalsConfig::base() { return DalsConfig{}; }

DalsConfig DalsConfig::fast() {
    DalsConfig c;
    c.name = "dals_fast";
    c.variant = DalsVariant::fast;
    c.lr = 0.05;
    c.warmup_frac = 0.02;
    c.momentum = 0.85;
    return c;
}

DalsConfig DalsConfig::acc() {
    DalsConfig c;
    c.name = "dals_acc";
    c.variant = DalsVariant::acc;
    c.alpha0 = 0.7;
    c.weight_decay = 5e-4;
    c.restart_epochs = 10.0;
    c.restart_mult = 2.0;
    return c;
}

void DalsConfig::validate() const {
    auto require = [this](bool ok, const char* what) {
        if (!ok) throw ConfigError(name + ": " + what);
    };
    require(std::isfinite(lr) && lr >= 0.0, "lr must be finite and non-negative");
    require(momentum >= 0.0 && momentum < 1.0, "momentum must lie in [0, 1)");
    require(warmup_frac >= 0.0 && warmup_frac < 1.0, "warmup fraction must lie in [0, 1)");
    require(alpha0 >= 0.0 && alpha0 < 1.0, "alpha0 must lie in [0, 1)");
    require(alpha_floor >= 0.0 && alpha_floor <= alpha_ceiling && alpha_ceiling <= 1.0,
            "alpha bounds must satisfy 0 <= floor <= ceiling <= 1");
    require(trust_coef > 0.0, "trust coefficient must be positive");
    require(trust_min > 0.0 && trust_min <= trust_max, "trust clamp must satisfy 0 < lo <= hi");
    require(eps > 0.0, "eps must be positive");
    require(weight_decay >= 0.0, "weight_decay must be non-negative");
    require(restart_epochs > 0.0 && restart_mult >= 1.0, "restart period/mult out of range");
    require(phases.ema_decay >= 0.0 && phases.ema_decay < 1.0, "loss EMA decay must lie in [0, 1)");
    require(phases.refine_threshold <= phases.explore_threshold, "phase thresholds out of order");
}

double adaptive_alpha(Phase phase, double alpha0) {
    DalsConfig cfg;
    cfg.alpha0 = alpha0;
    return adaptive_alpha(phase, cfg);
}

double adaptive_alpha(Phase phase, const DalsConfig& cfg) {
    switch (phase) {
        case Phase::exploration: return std::max(cfg.alpha_floor, cfg.alpha0 - cfg.explore_shift);
        case Phase::exploitation: return cfg.alpha0;
        case Phase::refinement: return std::min(cfg.alpha_ceiling, cfg.alpha0 + cfg.refine_shift);
    }
    return cfg.alpha0;
}

void depth_blend(std::span<const double> grad, std::span<const double> grad_ema, double depth_ratio,
                 std::span<double> out) {
    if (grad.size() != grad_ema.size() || out.size() != grad.size()) {
        throw ConfigError("depth_blend: size mismatch");
    }
    const double raw_weight = 0.3 + 0.4 * depth_ratio;
    for (std::size_t i = 0; i < grad.size(); ++i) {
        out[i] = grad_ema[i] + raw_weight * (grad[i] - grad_ema[i]);
    }
}

std::vector<double> depth_blend(std::span<const double> grad, std::span<const double> grad_ema,
                                double depth_ratio) {
    std::vector<double> out(grad.size());
    depth_blend(grad, grad_ema, depth_ratio, out);
    return out;
}

double trust_ratio(double param_norm, double grad_norm, const DalsConfig& cfg) {
    return std::clamp(cfg.trust_coef * param_norm / (grad_norm + cfg.eps), cfg.trust_min,
                      cfg.trust_max);
}

double trust_ratio(double param_norm, double grad_norm) {
    return trust_ratio(param_norm, grad_norm, DalsConfig{});
}

DalsSchedule::DalsSchedule(const DalsConfig& cfg, const TrainingHorizon& horizon)
    : variant_(cfg.variant) {
    const auto total = static_cast<double>(horizon.total_steps);
    warmup_.kind = ScheduleKind::warmup_cosine;
    warmup_.total_steps = total;
    warmup_.warmup_steps = cfg.warmup_frac * total;
    warmup_.validate();

    restarts_.kind = ScheduleKind::sgdr;
    restarts_.eta_max = 1.0;
    restarts_.eta_min = 0.0;
    restarts_.restart_period = cfg.restart_epochs * static_cast<double>(horizon.steps_per_epoch);
    restarts_.restart_mult = cfg.restart_mult;
    restarts_.validate();
}

double DalsSchedule::multiplier(std::int64_t t) const {
    const auto tt = static_cast<double>(t);
    if (variant_ != DalsVariant::acc) return warmup_cosine(tt, warmup_);
    // Warmup, then restarts measured from the end of warmup.
    if (tt < warmup_.warmup_steps) return tt / warmup_.warmup_steps;
    return sgdr(tt - warmup_.warmup_steps, restarts_);
}

DalsOptimizer::DalsOptimizer(DalsConfig cfg, const TrainingHorizon& horizon)
    : cfg_(std::move(cfg)), schedule_((cfg_.validate(), cfg_), horizon), detector_(cfg_.phases) {}

double DalsOptimizer::learning_rate(std::size_t, std::int64_t t) const {
    return cfg_.lr * schedule_.multiplier(t);
}

void DalsOptimizer::step(Model& model, const GradientOracle&, double batch_loss) {
    check_finite(model, cfg_.name, t_, true);
    if (!std::isfinite(batch_loss)) throw StrategyAbort(cfg_.name, t_, "", "non-finite loss");

    const Phase detected = detector_.update(batch_loss);
    const Phase phase = forced_phase_.value_or(detected);
    const double lr = learning_rate(0, t_);
    const double alpha = adaptive_alpha(phase, cfg_);
    const bool bypass = cfg_.variant == DalsVariant::fast && phase == Phase::exploration;

    auto slots = model.slots();
    if (states_.size() != slots.size()) {
        states_.clear();
        for (const auto& s : slots) {
            states_.push_back({Matrix(s.values.rows(), s.values.cols()),
                               Matrix(s.values.rows(), s.values.cols())});
        }
    }

    DalsTraceRow row;
    if (trace_) {
        row.step = t_;
        row.phase = phase;
        row.lr = lr;
        row.alpha.assign(model.n_layers(), alpha);
        row.trust.reserve(slots.size());
    }

    for (std::size_t i = 0; i < slots.size(); ++i) {
        auto& slot = slots[i];
        auto& st = states_[i];
        auto theta = slot.values.flat();
        const auto g = slot.grad.flat();

        std::span<const double> blended = g;
        if (!bypass) {
            grokfast_filter(st.grad_ema.flat(), g, alpha);
            blended_.resize(g.size());
            depth_blend(g, st.grad_ema.flat(), slot.depth_ratio, blended_);
            blended = blended_;
        }

        const double r = trust_ratio(l2_norm(theta), l2_norm(blended), cfg_);
        auto m = st.momentum.flat();
        const double step_size = lr * r;
        for (std::size_t j = 0; j < theta.size(); ++j) {
            m[j] = cfg_.momentum * m[j] + blended[j];
            theta[j] -= step_size * m[j];
        }
        if (cfg_.weight_decay > 0.0) {
            const double shrink = lr * cfg_.weight_decay;
            for (auto& v : theta) v -= shrink * v;
        }
        if (trace_) row.trust.push_back(r);
    }
    model.mark_updated();
    check_finite(model, cfg_.name, t_, false);
    if (trace_) trace_->push_back(std::move(row));
    ++t_;
}

std::unique_ptr<DalsOptimizer> make_dals(const DalsConfig& cfg, const TrainingHorizon& horizon) {
    if (horizon.total_steps < 1 || horizon.steps_per_epoch < 1) {
        throw ConfigError(cfg.name + ": training horizon must be positive");
    }
    return std::make_unique<DalsOptimizer>(cfg, horizon);
}

}  // namespace lrbench
