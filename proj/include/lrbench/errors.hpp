#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lrbench {

/// Invalid configuration or argument shape. Raised before any work starts.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A caller broke an API contract (e.g. backward with a stale cache).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A training step produced a non-finite value. Carries where it happened.
class StrategyAbort : public std::runtime_error {
public:
    StrategyAbort(std::string strategy, std::int64_t step, std::string slot, const std::string& what)
        : std::runtime_error(strategy + " aborted at step " + std::to_string(step) +
                             (slot.empty() ? std::string{} : " (slot " + slot + ")") + ": " + what),
          strategy_(std::move(strategy)),
          step_(step),
          slot_(std::move(slot)) {}

    const std::string& strategy() const noexcept { return strategy_; }
    std::int64_t step() const noexcept { return step_; }
    const std::string& slot() const noexcept { return slot_; }

private:
    std::string strategy_;
    std::int64_t step_;
    std::string slot_;
};

}  // namespace lrbench
