#include "lrbench/strategies.hpp"

#include <algorithm>
#include <cmath>

#include "lrbench/errors.hpp"

namespace lrbench {

std::string_view to_string(UpdateRule rule) {
    switch (rule) {
        case UpdateRule::sgd: return "sgd";
        case UpdateRule::adagrad: return "adagrad";
        case UpdateRule::rmsprop: return "rmsprop";
        case UpdateRule::adam: return "adam";
        case UpdateRule::adamw: return "adamw";
        case UpdateRule::adabound: return "adabound";
        case UpdateRule::lars: return "lars";
        case UpdateRule::radam: return "radam";
        case UpdateRule::lion: return "lion";
        case UpdateRule::grokfast_sgd: return "grokfast_sgd";
    }
    return "unknown";
}

void SlotState::ensure(std::size_t rows, std::size_t cols, bool momentum_buf, bool second_buf,
                       bool ema_buf) {
    auto alloc = [rows, cols](Matrix& m) {
        if (m.empty()) {
            m = Matrix(rows, cols);
        } else if (m.size() != rows * cols) {
            throw ConfigError("SlotState: buffer size does not match the slot");
        }
    };
    if (momentum_buf) alloc(momentum);
    if (second_buf) alloc(second_moment);
    if (ema_buf) alloc(grad_ema);
}

void StrategyConfig::validate() const {
    auto require = [this](bool ok, const char* what) {
        if (!ok) throw ConfigError(name + ": " + what);
    };
    require(std::isfinite(lr) && lr >= 0.0, "lr must be finite and non-negative");
    require(momentum >= 0.0 && momentum < 1.0, "momentum must lie in [0, 1)");
    require(weight_decay >= 0.0, "weight_decay must be non-negative");
    require(beta1 >= 0.0 && beta1 < 1.0, "beta1 must lie in [0, 1)");
    require(beta2 >= 0.0 && beta2 < 1.0, "beta2 must lie in [0, 1)");
    require(eps > 0.0, "eps must be positive");
    require(rms_decay >= 0.0 && rms_decay < 1.0, "rms_decay must lie in [0, 1)");
    require(final_lr > 0.0, "final_lr must be positive");
    require(lion_beta1 >= 0.0 && lion_beta1 <= 1.0, "lion_beta1 must lie in [0, 1]");
    require(lion_beta2 >= 0.0 && lion_beta2 <= 1.0, "lion_beta2 must lie in [0, 1]");
    require(delta >= 1.0, "delta must be >= 1");
    require(sam_radius >= 0.0, "sam radius must be non-negative");
    require(grok_alpha >= 0.0 && grok_alpha <= 1.0, "grokfast alpha must lie in [0, 1]");
    require(lookahead_k >= 1, "lookahead k must be >= 1");
    require(lookahead_alpha >= 0.0 && lookahead_alpha <= 1.0, "lookahead alpha must lie in [0, 1]");
    require(step_epochs > 0.0, "step_epochs must be positive");
    require(restart_epochs > 0.0, "restart_epochs must be positive");
    require(restart_mult >= 1.0, "restart_mult must be >= 1");
    require(cut_frac > 0.0 && cut_frac < 1.0, "cut_frac must lie in (0, 1)");
    require(stlr_ratio >= 1.0, "stlr ratio must be >= 1");
    require(schedule != ScheduleKind::warmup_cosine, "warmup_cosine is reserved for the DALS family");
}

ScheduleConfig resolve_schedule(const StrategyConfig& cfg, const TrainingHorizon& horizon) {
    const auto spe = static_cast<double>(horizon.steps_per_epoch);
    ScheduleConfig s;
    s.kind = cfg.schedule;
    s.eta_max = cfg.lr;
    s.eta_min = cfg.eta_min;
    s.gamma = cfg.gamma;
    s.step_size = cfg.step_epochs * spe;
    s.total_steps = static_cast<double>(horizon.total_steps);
    s.restart_period = cfg.restart_epochs * spe;
    s.restart_mult = cfg.restart_mult;
    s.cut_frac = cfg.cut_frac;
    s.ratio = cfg.stlr_ratio;
    return s;
}

namespace {

/// delta^(n_layers - 1 - l), by repeated multiplication so that two levels
/// below the top divide by exactly delta * delta.
std::vector<double> discriminative_divisors(double delta, std::size_t n_layers) {
    std::vector<double> div(n_layers, 1.0);
    for (std::size_t l = n_layers; l-- > 1;) div[l - 1] = div[l] * delta;
    return div;
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// Gradient with coupled weight decay folded in.
inline double decayed(double g, double theta, double lambda) {
    return lambda > 0.0 ? g + lambda * theta : g;
}

void check_sizes(std::span<double> theta, std::span<const double> grad) {
    if (theta.size() != grad.size()) throw ConfigError("update: parameter/gradient size mismatch");
}

struct Buffers {
    bool momentum, second, ema;
};

Buffers buffers_for(UpdateRule rule) {
    switch (rule) {
        case UpdateRule::sgd:
        case UpdateRule::lars:
        case UpdateRule::lion: return {true, false, false};
        case UpdateRule::adagrad:
        case UpdateRule::rmsprop: return {false, true, false};
        case UpdateRule::adam:
        case UpdateRule::adamw:
        case UpdateRule::adabound:
        case UpdateRule::radam: return {true, true, false};
        case UpdateRule::grokfast_sgd: return {true, false, true};
    }
    return {false, false, false};
}

}  // namespace

std::vector<double> discriminative_rates(double eta_top, double delta, std::size_t n_layers) {
    if (delta < 1.0) throw ConfigError("discriminative_rates: delta must be >= 1");
    const auto div = discriminative_divisors(delta, n_layers);
    std::vector<double> rates(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) rates[l] = eta_top / div[l];
    return rates;
}

void sgd_update(std::span<double> theta, std::span<const double> grad, SlotState& state,
                const StrategyConfig& cfg, double lr) {
    check_sizes(theta, grad);
    state.ensure(theta.size(), 1, true, false, false);
    ++state.step_count;
    auto m = state.momentum.flat();
    for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = cfg.momentum * m[i] + decayed(grad[i], theta[i], cfg.weight_decay);
        theta[i] -= lr * m[i];
    }
}

void adagrad_update(std::span<double> theta, std::span<const double> grad, SlotState& state,
                    const StrategyConfig& cfg, double lr) {
    check_sizes(theta, grad);
    state.ensure(theta.size(), 1, false, true, false);
    ++state.step_count;
    auto acc = state.second_moment.flat();
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double g = decayed(grad[i], theta[i], cfg.weight_decay);
        acc[i] += g * g;
        theta[i] -= lr * g / std::sqrt(acc[i] + cfg.eps);
    }
}

void rmsprop_update(std::span<double> theta, std::span<const double> grad, SlotState& state,
                    const StrategyConfig& cfg, double lr) {
    check_sizes(theta, grad);
    state.ensure(theta.size(), 1, false, true, false);
    ++state.step_count;
    auto sq = state.second_moment.flat();
    const double rho = cfg.rms_decay;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double g = decayed(grad[i], theta[i], cfg.weight_decay);
        sq[i] = rho * sq[i] + (1.0 - rho) * g * g;
        theta[i] -= lr * g / std::sqrt(sq[i] + cfg.eps);
    }
}

void adam_update(std::span<double> theta, std::span<const double> grad, SlotState& state,
                 const StrategyConfig& cfg, double lr, bool decoupled) {
    check_sizes(theta, grad);
    state.ensure(theta.size(), 1, true, true, false);
    const auto t = static_cast<double>(++state.step_count);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    auto m = state.momentum.flat();
    auto v = state.second_moment.flat();
    const double coupled = decoupled ? 0.0 : cfg.weight_decay;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double g = decayed(grad[i], theta[i], coupled);
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        double step = lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
        if (decoupled) step += lr * cfg.weight_decay * theta[i];
        theta[i] -= step;
    }
}

void adabound_update(std::span<double> theta, std::span<const double> grad, SlotState& state,
                     const StrategyConfig& cfg, double lr) {
    check_sizes(theta, grad);
    state.ensure(theta.size(), 1, true, true, false);
    const auto t = static_cast<double>(++state.step_count);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    const double speed = 1.0 - cfg.beta2;
    const double lower = cfg.final_lr * (1.0 - 1.0 / (speed * t + 1.0));
    const double upper = cfg.final_lr * (1.0 + 1.0 / (speed * t));
    auto m = state.momentum.flat();
    auto v = state.second_moment.flat();
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double g = decayed(grad[i], theta[i], cfg.weight_decay);
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        const double step = std::clamp(lr / (std::sqrt(v_hat) + cfg.eps), lower, upper);
        theta[i] -= step * m_hat;
    }
}

double lars_update(std::span<double> theta, std::span<const double> grad, SlotState& state,
                   const StrategyConfig& cfg, double lr) {
    check_sizes(theta, grad);
    state.ensure(theta.size(), 1, true, false, false);
    ++state.step_count;
    const double trust = l2_norm(theta) / (l2_norm(grad) + cfg.eps);
    auto m = state.momentum.flat();
    for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = cfg.momentum * m[i] + decayed(grad[i], theta[i], cfg.weight_decay);
        theta[i] -= lr * trust * m[i];
    }
    return trust;
}

double radam_rho_max(double beta2) { return 2.0 / (1.0 - beta2) - 1.0; }

double radam_rho(double beta2, std::int64_t t) {
    const double bt = std::pow(beta2, static_cast<double>(t));
    return radam_rho_max(beta2) - 2.0 * static_cast<double>(t) * bt / (1.0 - bt);
}

double radam_rectifier(double beta2, std::int64_t t) {
    const double rho_inf = radam_rho_max(beta2);
    const double rho_t = radam_rho(beta2, t);
    return std::sqrt((rho_t - 4.0) * (rho_t - 2.0) * rho_inf /
                     ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));
}

void radam_update(std::span<double> theta, std::span<const double> grad, SlotState& state,
                  const StrategyConfig& cfg, double lr) {
    check_sizes(theta, grad);
    state.ensure(theta.size(), 1, true, true, false);
    const std::int64_t step = ++state.step_count;
    const auto t = static_cast<double>(step);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    const bool rectified = radam_rho(cfg.beta2, step) > 4.0;
    const double r = rectified ? radam_rectifier(cfg.beta2, step) : 0.0;
    auto m = state.momentum.flat();
    auto v = state.second_moment.flat();
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double g = decayed(grad[i], theta[i], cfg.weight_decay);
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
        const double m_hat = m[i] / bc1;
        if (rectified) {
            const double v_hat = v[i] / bc2;
            theta[i] -= lr * r * m_hat / (std::sqrt(v_hat) + cfg.eps);
        } else {
            theta[i] -= lr * m_hat;
        }
    }
}

void lion_update(std::span<double> theta, std::span<const double> grad, SlotState& state,
                 const StrategyConfig& cfg, double lr) {
    check_sizes(theta, grad);
    state.ensure(theta.size(), 1, true, false, false);
    ++state.step_count;
    auto m = state.momentum.flat();
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double direction = sign(cfg.lion_beta1 * m[i] + (1.0 - cfg.lion_beta1) * grad[i]);
        theta[i] -= lr * direction + lr * cfg.weight_decay * theta[i];
        m[i] = cfg.lion_beta2 * m[i] + (1.0 - cfg.lion_beta2) * grad[i];
    }
}

void grokfast_filter(std::span<double> ema, std::span<const double> grad, double alpha) {
    if (ema.size() != grad.size()) throw ConfigError("grokfast_filter: size mismatch");
    for (std::size_t i = 0; i < ema.size(); ++i) ema[i] = alpha * ema[i] + (1.0 - alpha) * grad[i];
}

void check_finite(const Model& model, const std::string& strategy, std::int64_t step,
                  bool check_grads) {
    for (const auto& slot : model.slots()) {
        if (!slot.values.all_finite()) {
            throw StrategyAbort(strategy, step, slot.id, "non-finite parameter");
        }
        if (check_grads && !slot.grad.all_finite()) {
            throw StrategyAbort(strategy, step, slot.id, "non-finite gradient");
        }
    }
}

namespace {

class SlotwiseOptimizer final : public Optimizer {
public:
    SlotwiseOptimizer(StrategyConfig cfg, std::size_t n_layers, const TrainingHorizon& horizon)
        : cfg_(std::move(cfg)),
          schedule_(resolve_schedule(cfg_, horizon)),
          divisors_(cfg_.discriminative ? discriminative_divisors(cfg_.delta, n_layers)
                                        : std::vector<double>(n_layers, 1.0)) {
        schedule_.validate();
    }

    const std::string& name() const override { return cfg_.name; }

    double learning_rate(std::size_t layer, std::int64_t t) const override {
        const double base = schedule_value(static_cast<double>(t), schedule_);
        return layer < divisors_.size() ? base / divisors_[layer] : base;
    }

    std::int64_t steps_taken() const override { return t_; }

    void step(Model& model, const GradientOracle&, double) override {
        if (model.n_layers() != divisors_.size()) {
            throw ConfigError(cfg_.name + ": optimizer built for a different layer count");
        }
        check_finite(model, cfg_.name, t_, true);
        auto slots = model.slots();
        if (states_.size() != slots.size()) {
            states_.assign(slots.size(), SlotState{});
            const Buffers b = buffers_for(cfg_.rule);
            for (std::size_t i = 0; i < slots.size(); ++i) {
                states_[i].ensure(slots[i].values.rows(), slots[i].values.cols(), b.momentum,
                                  b.second, b.ema);
            }
        }
        for (std::size_t i = 0; i < slots.size(); ++i) {
            auto& slot = slots[i];
            const double lr = learning_rate(slot.layer_index, t_);
            apply(slot.values.flat(), slot.grad.flat(), states_[i], lr);
        }
        model.mark_updated();
        check_finite(model, cfg_.name, t_, false);
        ++t_;
    }

private:
    void apply(std::span<double> theta, std::span<const double> grad, SlotState& st, double lr) {
        switch (cfg_.rule) {
            case UpdateRule::sgd: sgd_update(theta, grad, st, cfg_, lr); break;
            case UpdateRule::adagrad: adagrad_update(theta, grad, st, cfg_, lr); break;
            case UpdateRule::rmsprop: rmsprop_update(theta, grad, st, cfg_, lr); break;
            case UpdateRule::adam: adam_update(theta, grad, st, cfg_, lr, false); break;
            case UpdateRule::adamw: adam_update(theta, grad, st, cfg_, lr, true); break;
            case UpdateRule::adabound: adabound_update(theta, grad, st, cfg_, lr); break;
            case UpdateRule::lars: lars_update(theta, grad, st, cfg_, lr); break;
            case UpdateRule::radam: radam_update(theta, grad, st, cfg_, lr); break;
            case UpdateRule::lion: lion_update(theta, grad, st, cfg_, lr); break;
            case UpdateRule::grokfast_sgd: {
                st.ensure(theta.size(), 1, false, false, true);
                grokfast_filter(st.grad_ema.flat(), grad, cfg_.grok_alpha);
                sgd_update(theta, st.grad_ema.flat(), st, cfg_, lr);
                break;
            }
        }
    }

    StrategyConfig cfg_;
    ScheduleConfig schedule_;
    std::vector<double> divisors_;
    std::vector<SlotState> states_;
    std::int64_t t_ = 0;
};

class SamOptimizer final : public Optimizer {
public:
    SamOptimizer(std::unique_ptr<Optimizer> inner, double radius)
        : inner_(std::move(inner)), radius_(radius), name_("sam(" + inner_->name() + ")") {}

    const std::string& name() const override { return name_; }
    double learning_rate(std::size_t layer, std::int64_t t) const override {
        return inner_->learning_rate(layer, t);
    }
    std::int64_t steps_taken() const override { return inner_->steps_taken(); }

    void step(Model& model, const GradientOracle& regrad, double batch_loss) override {
        double sq = 0.0;
        for (const auto& slot : model.slots()) sq += dot(slot.grad.flat(), slot.grad.flat());
        const double norm = std::sqrt(sq);
        if (norm == 0.0 || !regrad) {
            inner_->step(model, regrad, batch_loss);
            return;
        }
        if (!std::isfinite(norm)) {
            throw StrategyAbort(name_, inner_->steps_taken(), "", "non-finite gradient norm");
        }
        const double scale = radius_ / norm;
        saved_.resize(model.slots().size());
        auto slots = model.slots();
        for (std::size_t i = 0; i < slots.size(); ++i) {
            saved_[i] = slots[i].values;
            auto theta = slots[i].values.flat();
            const auto g = slots[i].grad.flat();
            for (std::size_t j = 0; j < theta.size(); ++j) theta[j] += scale * g[j];
        }
        model.mark_updated();
        regrad(model);
        for (std::size_t i = 0; i < slots.size(); ++i) slots[i].values = saved_[i];
        model.mark_updated();
        inner_->step(model, regrad, batch_loss);
    }

private:
    std::unique_ptr<Optimizer> inner_;
    double radius_;
    std::string name_;
    std::vector<Matrix> saved_;
};

class LookaheadOptimizer final : public Optimizer {
public:
    LookaheadOptimizer(std::unique_ptr<Optimizer> inner, std::int64_t k, double alpha)
        : inner_(std::move(inner)), k_(k), alpha_(alpha), name_("lookahead(" + inner_->name() + ")") {}

    const std::string& name() const override { return name_; }
    double learning_rate(std::size_t layer, std::int64_t t) const override {
        return inner_->learning_rate(layer, t);
    }
    std::int64_t steps_taken() const override { return inner_->steps_taken(); }

    void step(Model& model, const GradientOracle& regrad, double batch_loss) override {
        auto slots = model.slots();
        if (slow_.empty()) {
            slow_.reserve(slots.size());
            for (const auto& s : slots) slow_.push_back(s.values);
        }
        inner_->step(model, regrad, batch_loss);
        if (++fast_steps_ % k_ != 0) return;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            auto slow = slow_[i].flat();
            auto fast = slots[i].values.flat();
            for (std::size_t j = 0; j < slow.size(); ++j) {
                slow[j] = std::lerp(slow[j], fast[j], alpha_);
                fast[j] = slow[j];
            }
        }
        model.mark_updated();
    }

    const std::vector<Matrix>& slow_weights() const { return slow_; }

private:
    std::unique_ptr<Optimizer> inner_;
    std::int64_t k_;
    double alpha_;
    std::string name_;
    std::vector<Matrix> slow_;
    std::int64_t fast_steps_ = 0;
};

}  // namespace

std::unique_ptr<Optimizer> make_sam(std::unique_ptr<Optimizer> inner, double radius) {
    if (!inner) throw ConfigError("make_sam: inner optimizer is null");
    if (!(radius >= 0.0)) throw ConfigError("make_sam: radius must be non-negative");
    return std::make_unique<SamOptimizer>(std::move(inner), radius);
}

std::unique_ptr<Optimizer> make_lookahead(std::unique_ptr<Optimizer> inner, std::int64_t k,
                                          double alpha) {
    if (!inner) throw ConfigError("make_lookahead: inner optimizer is null");
    if (k < 1) throw ConfigError("make_lookahead: k must be >= 1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("make_lookahead: alpha must lie in [0, 1]");
    return std::make_unique<LookaheadOptimizer>(std::move(inner), k, alpha);
}

std::unique_ptr<Optimizer> make_strategy(const StrategyConfig& config, std::size_t n_layers,
                                         const TrainingHorizon& horizon) {
    config.validate();
    if (n_layers == 0) throw ConfigError(config.name + ": model has no layers");
    if (horizon.total_steps < 1 || horizon.steps_per_epoch < 1) {
        throw ConfigError(config.name + ": training horizon must be positive");
    }
    std::unique_ptr<Optimizer> opt = std::make_unique<SlotwiseOptimizer>(config, n_layers, horizon);
    switch (config.wrapper) {
        case Wrapper::none: return opt;
        case Wrapper::sam: return make_sam(std::move(opt), config.sam_radius);
        case Wrapper::lookahead:
            return make_lookahead(std::move(opt), config.lookahead_k, config.lookahead_alpha);
    }
    throw ConfigError(config.name + ": unknown wrapper");
}

}  // namespace lrbench
