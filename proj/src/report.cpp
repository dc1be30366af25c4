#include "lrbench/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lrbench/errors.hpp"

namespace lrbench {
namespace {

std::string fixed1(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

std::string full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> cells(const ReportRow& row) {
    std::vector<std::string> out{row.strategy, row.generation,
                                 row.best_accuracy ? fixed1(*row.best_accuracy * 100.0) : "-"};
    for (const auto& ep : row.threshold_epochs) out.push_back(ep ? std::to_string(*ep) : "-");
    out.push_back(fixed1(row.seconds));
    return out;
}

const std::vector<std::string>& header() {
    static const std::vector<std::string> h{"strategy", "generation", "best_acc", "ep60",
                                            "ep70",     "ep80",       "ep90",     "seconds"};
    return h;
}

}  // namespace

std::vector<ReportRow> summarize(std::span<const BenchmarkReport> per_seed) {
    std::vector<ReportRow> rows;
    if (per_seed.empty()) return rows;
    const std::size_t n = per_seed.front().rows.size();
    for (const auto& rep : per_seed) {
        if (rep.rows.size() != n) throw ConfigError("summarize: seeds ran different rosters");
    }
    for (std::size_t i = 0; i < n; ++i) {
        ReportRow row;
        row.strategy = per_seed.front().rows[i].strategy;
        row.generation = per_seed.front().rows[i].generation;
        bool ok = true;
        double acc_sum = 0.0;
        std::array<double, kAccuracyThresholds.size()> ep_sum{};
        std::array<bool, kAccuracyThresholds.size()> ep_all{};
        ep_all.fill(true);
        for (const auto& rep : per_seed) {
            const auto& r = rep.rows[i];
            if (!r.history) {
                ok = false;
                continue;
            }
            acc_sum += r.history->best_accuracy;
            row.seconds += r.history->wall_seconds;
            for (std::size_t k = 0; k < ep_sum.size(); ++k) {
                if (r.history->threshold_epochs[k]) {
                    ep_sum[k] += static_cast<double>(*r.history->threshold_epochs[k]);
                } else {
                    ep_all[k] = false;
                }
            }
        }
        if (ok) {
            const auto seeds = static_cast<double>(per_seed.size());
            row.best_accuracy = acc_sum / seeds;
            for (std::size_t k = 0; k < ep_sum.size(); ++k) {
                if (ep_all[k]) row.threshold_epochs[k] = static_cast<std::size_t>(std::ceil(ep_sum[k] / seeds));
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string render_csv(std::span<const ReportRow> rows) {
    std::ostringstream out;
    auto line = [&out](const std::vector<std::string>& c) {
        for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "," : "") << c[i];
        out << '\n';
    };
    line(header());
    for (const auto& r : rows) line(cells(r));
    return out.str();
}

std::string render_markdown(std::span<const ReportRow> rows) {
    std::ostringstream out;
    auto line = [&out](const std::vector<std::string>& c) {
        out << '|';
        for (const auto& s : c) out << ' ' << s << " |";
        out << '\n';
    };
    line(header());
    out << '|';
    for (std::size_t i = 0; i < header().size(); ++i) out << (i < 2 ? " --- |" : " ---: |");
    out << '\n';
    for (const auto& r : rows) line(cells(r));
    return out.str();
}

std::string render(std::span<const ReportRow> rows, ReportFormat format) {
    return format == ReportFormat::csv ? render_csv(rows) : render_markdown(rows);
}

void emit_report(std::span<const ReportRow> rows, ReportFormat format, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report to " + path.string());
    out << render(rows, format);
    if (!out.flush()) throw std::runtime_error("cannot write report to " + path.string());
}

std::string render_trace_csv(std::span<const DalsTraceRow> trace, std::span<const std::string> slot_ids) {
    std::ostringstream out;
    out << "step,phase,lr";
    const std::size_t n_layers = trace.empty() ? 0 : trace.front().alpha.size();
    for (std::size_t l = 0; l < n_layers; ++l) out << ",alpha_" << l;
    for (const auto& id : slot_ids) out << ",trust_" << id;
    out << '\n';
    for (const auto& row : trace) {
        out << row.step << ',' << static_cast<int>(row.phase) << ',' << full(row.lr);
        for (double a : row.alpha) out << ',' << full(a);
        for (double r : row.trust) out << ',' << full(r);
        out << '\n';
    }
    return out.str();
}

}  // namespace lrbench
