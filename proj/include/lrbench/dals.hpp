#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrbench/matrix.hpp"
#include "lrbench/optimizer.hpp"
#include "lrbench/schedules.hpp"

namespace lrbench {

enum class Phase : int { exploration = 0, exploitation = 1, refinement = 2 };

/// Classifies training into exploration / exploitation / refinement from the
/// relative improvement of an exponentially smoothed loss:
///
///   ema_t   = 0.95 ema_{t-1} + 0.05 loss_t
///   delta_t = (ema_{t-1} - ema_t) / |ema_{t-1}|
///
/// delta > 0.01 is exploration, (0.002, 0.01] exploitation, anything else
/// refinement. The first observation only seeds the EMA and reports exploration.
class PhaseDetector {
public:
    struct Settings {
        double ema_decay = 0.95;
        double explore_threshold = 0.01;
        double refine_threshold = 0.002;
    };

    PhaseDetector() = default;
    explicit PhaseDetector(Settings settings) : settings_(settings) {}

    /// Feeds one batch loss. Throws ConfigError on a non-finite loss.
    Phase update(double batch_loss);

    Phase phase() const noexcept { return phase_; }
    /// Last improvement rate, empty until two EMA values exist.
    std::optional<double> improvement() const noexcept { return improvement_; }
    std::optional<double> loss_ema() const noexcept { return ema_; }

    /// Phase for a given improvement rate.
    Phase classify(double improvement) const noexcept;

private:
    Settings settings_{};
    std::optional<double> ema_;
    std::optional<double> improvement_;
    Phase phase_ = Phase::exploration;
};

enum class DalsVariant { base, fast, acc };

std::string_view to_string(DalsVariant variant);

struct DalsConfig {
    std::string name = "dals";
    DalsVariant variant = DalsVariant::base;
    double lr = 0.03;             ///< eta_0
    double momentum = 0.9;        ///< mu
    double warmup_frac = 0.05;    ///< W / T
    double alpha0 = 0.6;          ///< base gradient-EMA coefficient
    double trust_coef = 0.02;     ///< gamma
    double trust_min = 0.2;
    double trust_max = 5.0;
    double eps = 1e-8;
    double weight_decay = 1e-4;   ///< decoupled, applied after the step
    double restart_epochs = 10.0; ///< acc variant: SGDR T_0
    double restart_mult = 2.0;    ///< acc variant: SGDR T_mult

    // Phase-dependent alpha: exploration max(floor, alpha0 - explore_shift),
    // refinement min(ceiling, alpha0 + refine_shift).
    double alpha_floor = 0.3;
    double alpha_ceiling = 0.9;
    double explore_shift = 0.3;
    double refine_shift = 0.1;

    PhaseDetector::Settings phases{};

    static DalsConfig base();
    /// eta_0 0.05, 2% warmup, momentum 0.85, no filtering during exploration.
    static DalsConfig fast();
    /// alpha0 0.7, weight decay 5e-4, warm restarts with T_0 10 epochs, T_mult 2.
    static DalsConfig acc();

    void validate() const;
};

/// Phase-dependent filter coefficient under the default floor, ceiling and shifts.
double adaptive_alpha(Phase phase, double alpha0);
double adaptive_alpha(Phase phase, const DalsConfig& cfg);

/// (0.3 + 0.4 d) g + (0.7 - 0.4 d) g_ema, evaluated as g_ema + c (g - g_ema)
/// with c = 0.3 + 0.4 d so that g == g_ema returns g exactly.
void depth_blend(std::span<const double> grad, std::span<const double> grad_ema, double depth_ratio,
                 std::span<double> out);
std::vector<double> depth_blend(std::span<const double> grad, std::span<const double> grad_ema,
                                double depth_ratio);

/// clamp(coef * param_norm / (grad_norm + eps), lo, hi)
double trust_ratio(double param_norm, double grad_norm, const DalsConfig& cfg);
double trust_ratio(double param_norm, double grad_norm);

struct DalsSlotState {
    Matrix grad_ema;
    Matrix momentum;
};

/// One row per optimizer step.
struct DalsTraceRow {
    std::int64_t step = 0;
    Phase phase = Phase::exploration;
    double lr = 0.0;                 ///< eta_t
    std::vector<double> alpha;       ///< per layer
    std::vector<double> trust;       ///< per slot, model slot order
};

/// Learning-rate multiplier for the variant: warmup then cosine, or warmup
/// then SGDR cycles (acc).
class DalsSchedule {
public:
    DalsSchedule(const DalsConfig& cfg, const TrainingHorizon& horizon);
    double multiplier(std::int64_t t) const;
    double warmup_steps() const noexcept { return warmup_.warmup_steps; }

private:
    DalsVariant variant_;
    ScheduleConfig warmup_;
    ScheduleConfig restarts_;
};

class DalsOptimizer final : public Optimizer {
public:
    DalsOptimizer(DalsConfig cfg, const TrainingHorizon& horizon);

    const std::string& name() const override { return cfg_.name; }
    void step(Model& model, const GradientOracle& regrad, double batch_loss) override;
    double learning_rate(std::size_t layer, std::int64_t t) const override;
    std::int64_t steps_taken() const override { return t_; }

    const PhaseDetector& detector() const noexcept { return detector_; }
    std::span<const DalsSlotState> states() const noexcept { return states_; }
    const DalsConfig& config() const noexcept { return cfg_; }

    /// Appends one row per step to `sink` until detached with nullptr.
    void set_trace(std::vector<DalsTraceRow>* sink) noexcept { trace_ = sink; }

    /// Pins the phase used for filtering, bypassing loss-based detection.
    /// For controlled experiments; the detector still observes losses.
    void force_phase(std::optional<Phase> phase) noexcept { forced_phase_ = phase; }

private:
    DalsConfig cfg_;
    DalsSchedule schedule_;
    PhaseDetector detector_;
    std::vector<DalsSlotState> states_;
    std::vector<double> blended_;
    std::vector<DalsTraceRow>* trace_ = nullptr;
    std::optional<Phase> forced_phase_;
    std::int64_t t_ = 0;
};

std::unique_ptr<DalsOptimizer> make_dals(const DalsConfig& cfg, const TrainingHorizon& horizon);

}  // namespace lrbench
