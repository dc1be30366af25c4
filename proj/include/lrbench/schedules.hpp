#pragma once

#include <string_view>

namespace lrbench {

enum class ScheduleKind { fixed, step, cosine, sgdr, stlr, warmup_cosine };

std::string_view to_string(ScheduleKind kind);

/// Learning-rate schedule parameters, all in optimizer steps.
///
/// `eta_max` doubles as the base rate for fixed and step schedules. For
/// warmup_cosine the result is the unit-peak multiplier s(t) and eta values
/// are ignored.
struct ScheduleConfig {
    ScheduleKind kind = ScheduleKind::fixed;
    double eta_max = 1.0;
    double eta_min = 0.0;
    double gamma = 0.1;      ///< step decay factor
    double step_size = 1.0;  ///< steps between step-decay drops
    double total_steps = 1.0;
    double restart_period = 1.0;  ///< first SGDR cycle length
    double restart_mult = 1.0;    ///< SGDR cycle growth
    double cut_frac = 0.1;
    double ratio = 32.0;
    double warmup_steps = 0.0;

    /// Throws ConfigError when a field required by `kind` is out of range.
    void validate() const;
};

/// eta_max * gamma^floor(t / step_size)
double step_decay(double t, const ScheduleConfig& cfg);

/// eta_min + (eta_max - eta_min)(1 + cos(pi t / T)) / 2
double cosine(double t, const ScheduleConfig& cfg);

/// Cosine annealing with warm restarts. Cycle lengths are restart_period,
/// restart_period * restart_mult, ...; on a boundary the new cycle starts at eta_max.
double sgdr(double t, const ScheduleConfig& cfg);

/// Start of the SGDR cycle containing t.
double sgdr_cycle_start(double t, const ScheduleConfig& cfg);

/// Slanted triangular rate: linear warmup over cut = floor(T * cut_frac) steps,
/// then linear decay. p is clamped to [0, 1], so the output stays within
/// [eta_max / ratio, eta_max].
double stlr(double t, const ScheduleConfig& cfg);

/// Linear warmup t / W, then half-cosine from 1 down to 0 at T.
double warmup_cosine(double t, const ScheduleConfig& cfg);

/// Dispatch on cfg.kind. fixed returns eta_max.
double schedule_value(double t, const ScheduleConfig& cfg);

}  // namespace lrbench
