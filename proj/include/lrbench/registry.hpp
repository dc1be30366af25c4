#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lrbench/dals.hpp"
#include "lrbench/defaults.hpp"
#include "lrbench/strategies.hpp"

namespace lrbench {

using StrategySpec = std::variant<StrategyConfig, DalsConfig>;

struct RosterEntry {
    std::string_view name;        ///< CLI identifier
    std::string_view display;     ///< table label
    std::string_view generation;  ///< "Gen 1" ... "Gen 5", "SOTA"
};

/// The 18 benchmark strategies in table order.
std::span<const RosterEntry> roster();

const RosterEntry& roster_entry(std::string_view name);
bool is_known_strategy(std::string_view name);
/// Comma-separated roster names, for error messages.
std::string roster_names();

/// Configuration for a roster strategy with hyperparameters from `defaults`.
StrategySpec strategy_spec(std::string_view name, const Defaults& defaults = Defaults{});

std::string_view spec_name(const StrategySpec& spec);

/// Builds the optimizer for either alternative of `spec`.
std::unique_ptr<Optimizer> build_optimizer(const StrategySpec& spec, std::size_t n_layers,
                                           const TrainingHorizon& horizon);

}  // namespace lrbench
