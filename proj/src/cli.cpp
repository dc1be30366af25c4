#include "lrbench/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

#include "lrbench/errors.hpp"
#include "lrbench/mlp.hpp"

namespace lrbench {
namespace {

const std::map<std::string, ReportFormat> kFormats{{"csv", ReportFormat::csv},
                                                   {"markdown", ReportFormat::markdown}};

std::vector<std::string> expand_strategies(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& name : raw) {
        if (name == "all") {
            for (const auto& e : roster()) out.emplace_back(e.name);
        } else if (is_known_strategy(name)) {
            out.push_back(name);
        } else {
            throw UsageError("unknown strategy '" + name + "'; valid names: all," + roster_names(), 2);
        }
    }
    return out;
}

}  // namespace

CliOptions parse_options(int argc, const char* const* argv) {
    CliOptions opts;
    std::vector<std::string> strategies{"all"};
    std::string format = "csv";
    std::string output, trace, defaults_file, dump_data;

    CLI::App app{"Learning-rate strategy benchmark on the synthetic Gaussian-mixture task", "lrbench"};
    app.add_option("--strategies", strategies, "Comma-separated strategy names, or 'all'")
        ->delimiter(',');
    app.add_option("--seed", opts.seeds, "Comma-separated run seeds (init and shuffling)")->delimiter(',');
    app.add_option("--epochs", opts.epochs, "Training epochs")->check(CLI::PositiveNumber);
    app.add_option("--batch-size", opts.batch_size, "Mini-batch size")->check(CLI::PositiveNumber);
    app.add_option("--jobs", opts.jobs, "Runs executed concurrently")->check(CLI::PositiveNumber);
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "markdown"}));
    app.add_option("--output", output, "Report path (stdout when omitted)");
    app.add_option("--trace", trace, "Per-step DALS trace path; one file per DALS-family strategy");
    app.add_option("--defaults", defaults_file, "Hyperparameter file (key = value)");
    app.add_option("--set", opts.overrides, "Hyperparameter override key=value (repeatable)");
    app.add_option("--dump-data", dump_data, "Write the synthetic dataset as CSV and exit");
    app.add_flag("--list", opts.list, "List strategy names and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        throw UsageError(app.help(), 0);
    } catch (const CLI::ParseError& e) {
        throw UsageError(std::string(e.what()) + "\n" + app.help(), e.get_exit_code() ? e.get_exit_code() : 2);
    }

    if (opts.seeds.empty()) throw UsageError("--seed needs at least one value", 2);
    opts.strategies = expand_strategies(strategies);
    opts.format = kFormats.at(format);
    if (!output.empty()) opts.output = output;
    if (!trace.empty()) opts.trace = trace;
    if (!defaults_file.empty()) opts.defaults_file = defaults_file;
    if (!dump_data.empty()) opts.dump_data = dump_data;
    for (const auto& o : opts.overrides) {
        if (o.find('=') == std::string::npos) throw UsageError("--set expects key=value, got '" + o + "'", 2);
    }
    return opts;
}

CliOptions parse_options(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"lrbench"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return parse_options(static_cast<int>(argv.size()), argv.data());
}

std::vector<std::string> render_flags(const CliOptions& opts) {
    auto join = [](const auto& items) {
        std::string s;
        for (const auto& item : items) {
            if (!s.empty()) s += ',';
            if constexpr (std::is_same_v<std::decay_t<decltype(item)>, std::string>) {
                s += item;
            } else {
                s += std::to_string(item);
            }
        }
        return s;
    };
    std::vector<std::string> args{"--strategies", join(opts.strategies),
                                  "--seed",       join(opts.seeds),
                                  "--epochs",     std::to_string(opts.epochs),
                                  "--batch-size", std::to_string(opts.batch_size),
                                  "--jobs",       std::to_string(opts.jobs),
                                  "--format",     opts.format == ReportFormat::csv ? "csv" : "markdown"};
    if (opts.output) args.insert(args.end(), {"--output", opts.output->string()});
    if (opts.trace) args.insert(args.end(), {"--trace", opts.trace->string()});
    if (opts.defaults_file) args.insert(args.end(), {"--defaults", opts.defaults_file->string()});
    for (const auto& o : opts.overrides) args.insert(args.end(), {"--set", o});
    if (opts.dump_data) args.insert(args.end(), {"--dump-data", opts.dump_data->string()});
    if (opts.list) args.emplace_back("--list");
    return args;
}

Defaults resolve_defaults(const CliOptions& opts) {
    Defaults d;
    if (opts.defaults_file) d.load(*opts.defaults_file);
    for (const auto& o : opts.overrides) d.apply(o);
    return d;
}

std::vector<RunConfig> build_runs(const CliOptions& opts, const Defaults& defaults, std::uint64_t seed) {
    std::vector<RunConfig> runs;
    runs.reserve(opts.strategies.size());
    for (const auto& name : opts.strategies) {
        RunConfig cfg = benchmark_run(name, defaults);
        cfg.epochs = opts.epochs;
        cfg.batch_size = opts.batch_size;
        cfg.seed = seed;
        cfg.trace = opts.trace.has_value() && std::holds_alternative<DalsConfig>(cfg.strategy);
        runs.push_back(std::move(cfg));
    }
    return runs;
}

std::filesystem::path trace_path(const std::filesystem::path& base, const std::string& strategy) {
    auto p = base;
    p.replace_filename(base.stem().string() + "_" + strategy + base.extension().string());
    return p;
}

int run_cli(int argc, const char* const* argv) {
    CliOptions opts;
    try {
        opts = parse_options(argc, argv);
    } catch (const UsageError& e) {
        (e.exit_code() == 0 ? std::cout : std::cerr) << e.what() << '\n';
        return e.exit_code();
    }

    if (opts.list) {
        for (const auto& e : roster()) std::cout << e.name << '\t' << e.generation << '\t' << e.display << '\n';
        return 0;
    }

    try {
        const Defaults defaults = resolve_defaults(opts);

        if (opts.dump_data) {
            std::ofstream out(*opts.dump_data);
            if (!out) throw std::runtime_error("cannot write " + opts.dump_data->string());
            write_csv(generate(DataConfig{}), out);
            return out ? 0 : 1;
        }

        std::vector<BenchmarkReport> reports;
        for (const auto seed : opts.seeds) {
            const auto runs = build_runs(opts, defaults, seed);
            reports.push_back(run_benchmark(runs, opts.jobs));
            const auto& rep = reports.back();
            for (const auto& row : rep.rows) {
                if (!row.history) {
                    std::cerr << "run failed (seed " << seed << "): " << row.error << '\n';
                    continue;
                }
                if (opts.trace && !row.history->trace.empty()) {
                    std::string label = row.strategy;
                    if (opts.seeds.size() > 1) label += "_s" + std::to_string(seed);
                    const Model shape(kBenchmarkLayerSizes);
                    std::vector<std::string> ids;
                    for (const auto& s : shape.slots()) ids.push_back(s.id);
                    const auto path = trace_path(*opts.trace, label);
                    std::ofstream out(path);
                    out << render_trace_csv(row.history->trace, ids);
                    if (!out) throw std::runtime_error("cannot write trace to " + path.string());
                }
            }
        }

        const auto rows = summarize(reports);
        if (opts.output) {
            emit_report(rows, opts.format, *opts.output);
        } else {
            std::cout << render(rows, opts.format);
        }
        const bool ok = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.all_succeeded(); });
        return ok ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace lrbench
