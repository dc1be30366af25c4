#pragma once

// Named numeric checks shared by the unit suites and the acceptance runner.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "lrbench/registry.hpp"

namespace testsupport {

struct Check {
    std::string name;
    bool ok = false;
    std::string detail;
};

/// Values of the four scalar slots (w0, b0, w1, b1) of a 1-1-1 network after
/// each step.
using ScalarTrace = std::vector<std::array<double, 4>>;

inline constexpr std::size_t kTraceSteps = 5;

/// Horizon used by the scalar traces: 20 steps of 4 per epoch, so schedules
/// move within five steps.
lrbench::TrainingHorizon trace_horizon();

/// Roster spec with the schedule lengths shortened so restarts, STLR cut and
/// Lookahead syncs all fall inside the trace.
lrbench::StrategySpec trace_spec(const std::string& name);

/// Runs the library optimizer for `spec` on the scalar problem.
ScalarTrace library_trace(const lrbench::StrategySpec& spec, std::size_t steps = kTraceSteps);
/// Runs the straight-line reference for `spec` on the same problem.
ScalarTrace oracle_trace(const lrbench::StrategySpec& spec, std::size_t steps = kTraceSteps);
double max_abs_diff(const ScalarTrace& a, const ScalarTrace& b);

/// Analytic schedule examples, each to 1e-12.
std::vector<Check> schedule_example_checks();
/// Library vs oracle traces for all 18 strategies plus the AdaGrad and
/// RMSProp rules, each to 1e-12.
std::vector<Check> optimizer_trace_checks();
/// Central differences (h = 1e-5) against backprop on a 16-sample batch,
/// relative error 1e-4, per slot of the benchmark network.
std::vector<Check> gradient_checks();
/// Exact trajectory identities on the benchmark network: DALS with an inert
/// filter and unit trust against momentum SGD under warmup-cosine, SAM with a
/// zero radius and Lookahead with k = 1, alpha = 1 against their inner optimizers.
std::vector<Check> reduction_checks();
/// adaptive_alpha triple, trust clamp bounds and the discriminative triple.
std::vector<Check> published_value_checks();

}  // namespace testsupport
