#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lrbench/matrix.hpp"
#include "lrbench/optimizer.hpp"
#include "lrbench/schedules.hpp"

namespace lrbench {

/// Per-parameter update rule applied to every slot.
enum class UpdateRule { sgd, adagrad, rmsprop, adam, adamw, adabound, lars, radam, lion, grokfast_sgd };

/// Optional decorator around the slot-wise optimizer.
enum class Wrapper { none, sam, lookahead };

std::string_view to_string(UpdateRule rule);

/// Optimizer state for one slot. Buffers are allocated with the slot's shape
/// by the rules that use them and stay empty otherwise.
struct SlotState {
    Matrix momentum;       ///< m
    Matrix second_moment;  ///< v, E[g^2] or the AdaGrad accumulator G
    Matrix grad_ema;       ///< filtered gradient
    Matrix slow_weights;   ///< Lookahead anchor
    std::int64_t step_count = 0;

    /// Allocates each requested buffer that is still empty as a zero rows x cols
    /// matrix. Throws ConfigError if a present buffer has a different size.
    void ensure(std::size_t rows, std::size_t cols, bool momentum_buf, bool second_buf, bool ema_buf);
};

/// A strategy is an update rule composed with a global schedule, optional
/// per-layer discriminative scaling and an optional wrapper. Schedule lengths
/// are given in epochs and resolved to steps against a TrainingHorizon.
struct StrategyConfig {
    std::string name = "strategy";
    UpdateRule rule = UpdateRule::sgd;
    ScheduleKind schedule = ScheduleKind::fixed;
    bool discriminative = false;
    Wrapper wrapper = Wrapper::none;

    double lr = 0.01;
    double momentum = 0.9;
    double weight_decay = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double rms_decay = 0.9;      ///< RMSProp rho
    double final_lr = 0.01;      ///< AdaBound eta_sgd
    double lion_beta1 = 0.9;
    double lion_beta2 = 0.99;
    double delta = 2.6;          ///< discriminative decay factor
    double sam_radius = 0.05;
    double grok_alpha = 0.98;
    std::int64_t lookahead_k = 5;
    double lookahead_alpha = 0.5;

    double eta_min = 0.0;
    double gamma = 0.1;          ///< step decay factor
    double step_epochs = 30.0;
    double restart_epochs = 10.0;
    double restart_mult = 2.0;
    double cut_frac = 0.1;
    double stlr_ratio = 32.0;

    void validate() const;
};

/// Schedule in steps for `cfg` over `horizon`, peaking at cfg.lr.
ScheduleConfig resolve_schedule(const StrategyConfig& cfg, const TrainingHorizon& horizon);

/// eta^{l-1} = eta^l / delta with eta_top for the top layer. Index 0 is the bottom layer.
std::vector<double> discriminative_rates(double eta_top, double delta, std::size_t n_layers);

// Slot update kernels. `theta` and `grad` are the flattened slot values and
// gradient; `state` buffers are allocated on first use. Rules that fold
// weight decay into the gradient do so only when cfg.weight_decay > 0.

void sgd_update(std::span<double> theta, std::span<const double> grad, SlotState& state,
                const StrategyConfig& cfg, double lr);
void adagrad_update(std::span<double> theta, std::span<const double> grad, SlotState& state,
                    const StrategyConfig& cfg, double lr);
void rmsprop_update(std::span<double> theta, std::span<const double> grad, SlotState& state,
                    const StrategyConfig& cfg, double lr);
/// Bias-corrected Adam. With `decoupled` the decay term -lr * lambda * theta is
/// applied alongside (AdamW); otherwise lambda is folded into the gradient.
void adam_update(std::span<double> theta, std::span<const double> grad, SlotState& state,
                 const StrategyConfig& cfg, double lr, bool decoupled);
void adabound_update(std::span<double> theta, std::span<const double> grad, SlotState& state,
                     const StrategyConfig& cfg, double lr);
/// Momentum SGD scaled by the trust ratio ||theta|| / (||g|| + eps). Returns the ratio.
double lars_update(std::span<double> theta, std::span<const double> grad, SlotState& state,
                   const StrategyConfig& cfg, double lr);
void radam_update(std::span<double> theta, std::span<const double> grad, SlotState& state,
                  const StrategyConfig& cfg, double lr);
void lion_update(std::span<double> theta, std::span<const double> grad, SlotState& state,
                 const StrategyConfig& cfg, double lr);

/// ema <- alpha * ema + (1 - alpha) * grad, in place.
void grokfast_filter(std::span<double> ema, std::span<const double> grad, double alpha);

/// RAdam's maximum and step-t lengths of the approximated simple moving average.
double radam_rho_max(double beta2);
double radam_rho(double beta2, std::int64_t t);
/// Variance rectification term; only meaningful when radam_rho(beta2, t) > 4.
double radam_rectifier(double beta2, std::int64_t t);

/// Builds the optimizer described by `config` for a model with `n_layers`
/// linear layers. Throws ConfigError for invalid configurations.
std::unique_ptr<Optimizer> make_strategy(const StrategyConfig& config, std::size_t n_layers,
                                         const TrainingHorizon& horizon);

/// SAM: ascend to theta + rho g / ||g|| (norm over all slots), recompute the
/// gradient there, restore theta and let `inner` step with that gradient.
std::unique_ptr<Optimizer> make_sam(std::unique_ptr<Optimizer> inner, double radius);

/// Lookahead: every k inner steps, slow <- slow + alpha (fast - slow), fast <- slow.
std::unique_ptr<Optimizer> make_lookahead(std::unique_ptr<Optimizer> inner, std::int64_t k,
                                          double alpha);

/// Throws StrategyAbort if any slot value or gradient is non-finite.
void check_finite(const Model& model, const std::string& strategy, std::int64_t step,
                  bool check_grads);

}  // namespace lrbench
