#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrbench/harness.hpp"

namespace lrbench {

enum class ReportFormat { csv, markdown };

/// One table row: best accuracy plus the convergence-speed columns.
struct ReportRow {
    std::string strategy;
    std::string generation;
    std::optional<double> best_accuracy;  ///< fraction; empty if any seed failed
    std::array<std::optional<std::size_t>, kAccuracyThresholds.size()> threshold_epochs{};
    double seconds = 0.0;
};

/// Rows for one benchmark per seed (all over the same roster). Accuracy is the
/// mean over seeds; a threshold epoch is the rounded-up mean when every seed
/// crossed it; seconds are summed.
std::vector<ReportRow> summarize(std::span<const BenchmarkReport> per_seed);

/// Header `strategy,generation,best_acc,ep60,ep70,ep80,ep90,seconds`,
/// accuracy in percent and seconds with one decimal, `-` for missing cells.
std::string render_csv(std::span<const ReportRow> rows);
/// Pipe table with the same columns as render_csv.
std::string render_markdown(std::span<const ReportRow> rows);
std::string render(std::span<const ReportRow> rows, ReportFormat format);

/// Writes the rendered report to `path`. Throws std::runtime_error when the
/// file cannot be written.
void emit_report(std::span<const ReportRow> rows, ReportFormat format, const std::filesystem::path& path);

/// Per-step DALS trace: step,phase,lr,alpha_<layer>...,trust_<slot>...
std::string render_trace_csv(std::span<const DalsTraceRow> trace, std::span<const std::string> slot_ids);

}  // namespace lrbench
