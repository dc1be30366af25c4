#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "lrbench/mlp.hpp"

namespace lrbench {

/// Recomputes loss and slot gradients at the model's current values on the
/// batch being stepped. Returns the loss. Two-pass optimizers (SAM) call it.
using GradientOracle = std::function<double(Model&)>;

/// Length of a training run in optimizer steps.
struct TrainingHorizon {
    std::int64_t total_steps = 1;
    std::int64_t steps_per_epoch = 1;
};

/// Common step interface over a Model's slots. Implementations own their
/// per-slot state and are bound to one training run.
class Optimizer {
public:
    virtual ~Optimizer() = default;

    virtual const std::string& name() const = 0;

    /// Applies one update from the gradients already in the model's slots.
    /// `batch_loss` is the loss those gradients were computed from.
    virtual void step(Model& model, const GradientOracle& regrad, double batch_loss) = 0;

    /// Effective learning rate for `layer` at step t (0-based).
    virtual double learning_rate(std::size_t layer, std::int64_t t) const = 0;

    /// Number of completed steps; the next step uses t == steps_taken().
    virtual std::int64_t steps_taken() const = 0;
};

}  // namespace lrbench
