#include "lrbench/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lrbench/errors.hpp"

namespace lrbench {

std::string_view to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::fixed: return "fixed";
        case ScheduleKind::step: return "step";
        case ScheduleKind::cosine: return "cosine";
        case ScheduleKind::sgdr: return "sgdr";
        case ScheduleKind::stlr: return "stlr";
        case ScheduleKind::warmup_cosine: return "warmup_cosine";
    }
    return "unknown";
}

void ScheduleConfig::validate() const {
    if (!std::isfinite(eta_max) || !std::isfinite(eta_min)) {
        throw ConfigError("schedule: eta values must be finite");
    }
    switch (kind) {
        case ScheduleKind::fixed:
            break;
        case ScheduleKind::step:
            if (!(step_size > 0.0)) throw ConfigError("schedule: step_size must be positive");
            if (!(gamma > 0.0)) throw ConfigError("schedule: gamma must be positive");
            break;
        case ScheduleKind::cosine:
            if (!(total_steps > 0.0)) throw ConfigError("schedule: T must be positive");
            break;
        case ScheduleKind::sgdr:
            if (!(restart_period > 0.0)) throw ConfigError("schedule: T0 must be positive");
            if (!(restart_mult >= 1.0)) throw ConfigError("schedule: T_mult must be >= 1");
            break;
        case ScheduleKind::stlr:
            if (!(total_steps > 0.0)) throw ConfigError("schedule: T must be positive");
            if (!(cut_frac > 0.0 && cut_frac < 1.0)) {
                throw ConfigError("schedule: cut_frac must lie in (0, 1)");
            }
            if (!(ratio >= 1.0)) throw ConfigError("schedule: ratio must be >= 1");
            if (std::floor(total_steps * cut_frac) < 1.0) {
                throw ConfigError("schedule: T * cut_frac must be at least one step");
            }
            break;
        case ScheduleKind::warmup_cosine:
            if (!(total_steps > 0.0)) throw ConfigError("schedule: T must be positive");
            if (!(warmup_steps >= 0.0 && warmup_steps < total_steps)) {
                throw ConfigError("schedule: warmup must satisfy 0 <= W < T");
            }
            break;
    }
}

double step_decay(double t, const ScheduleConfig& cfg) {
    return cfg.eta_max * std::pow(cfg.gamma, std::floor(t / cfg.step_size));
}

double cosine(double t, const ScheduleConfig& cfg) {
    return cfg.eta_min +
           0.5 * (cfg.eta_max - cfg.eta_min) * (1.0 + std::cos(t * std::numbers::pi / cfg.total_steps));
}

namespace {

struct Cycle {
    double start;
    double length;
};

Cycle sgdr_cycle(double t, const ScheduleConfig& cfg) {
    double start = 0.0;
    double length = cfg.restart_period;
    if (cfg.restart_mult == 1.0) {
        const double k = std::floor(t / length);
        return {k * length, length};
    }
    while (t >= start + length) {
        start += length;
        length *= cfg.restart_mult;
    }
    return {start, length};
}

}  // namespace

double sgdr_cycle_start(double t, const ScheduleConfig& cfg) { return sgdr_cycle(t, cfg).start; }

double sgdr(double t, const ScheduleConfig& cfg) {
    const Cycle c = sgdr_cycle(t, cfg);
    ScheduleConfig inner = cfg;
    inner.total_steps = c.length;
    return cosine(t - c.start, inner);
}

double stlr(double t, const ScheduleConfig& cfg) {
    const double cut = std::floor(cfg.total_steps * cfg.cut_frac);
    double p = t < cut ? t / cut : 1.0 - (t - cut) / (cut * (1.0 / cfg.cut_frac - 1.0));
    p = std::clamp(p, 0.0, 1.0);
    return cfg.eta_max * (1.0 + p * (cfg.ratio - 1.0)) / cfg.ratio;
}

double warmup_cosine(double t, const ScheduleConfig& cfg) {
    const double w = cfg.warmup_steps;
    if (t < w) return t / w;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (t - w) / (cfg.total_steps - w)));
}

double schedule_value(double t, const ScheduleConfig& cfg) {
    switch (cfg.kind) {
        case ScheduleKind::fixed: return cfg.eta_max;
        case ScheduleKind::step: return step_decay(t, cfg);
        case ScheduleKind::cosine: return cosine(t, cfg);
        case ScheduleKind::sgdr: return sgdr(t, cfg);
        case ScheduleKind::stlr: return stlr(t, cfg);
        case ScheduleKind::warmup_cosine: return warmup_cosine(t, cfg);
    }
    return cfg.eta_max;
}

}  // namespace lrbench
