#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>

#include "lrbench/dals.hpp"
#include "lrbench/errors.hpp"
#include "lrbench/harness.hpp"
#include "lrbench/registry.hpp"
#include "lrbench/report.hpp"
#include "lrbench/schedules.hpp"
#include "lrbench/strategies.hpp"
#include "lrbench/synthdata.hpp"

namespace py = pybind11;
using namespace lrbench;

namespace {

py::array_t<double> to_numpy(const Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::copy(m.flat().begin(), m.flat().end(), out.mutable_data());
    return out;
}

py::array_t<std::int64_t> to_numpy(const std::vector<std::size_t>& v) {
    py::array_t<std::int64_t> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

Defaults with_overrides(const std::map<std::string, double>& overrides) {
    Defaults d;
    for (const auto& [key, value] : overrides) d.set(key, value);
    return d;
}

RunConfig make_run(const std::string& strategy, std::size_t epochs, std::size_t batch_size, std::uint64_t seed,
                   std::size_t n_samples, bool trace, const std::map<std::string, double>& overrides) {
    RunConfig cfg = benchmark_run(strategy, with_overrides(overrides));
    cfg.epochs = epochs;
    cfg.batch_size = batch_size;
    cfg.seed = seed;
    cfg.data.n_samples = n_samples;
    cfg.trace = trace;
    return cfg;
}

py::object optional_epoch(const std::optional<std::size_t>& e) {
    return e ? py::object(py::int_(*e)) : py::object(py::none());
}

py::dict history_dict(const RunHistory& h) {
    py::list epochs;
    for (const auto& e : h.epochs) {
        py::dict d;
        d["train_loss"] = e.train_loss;
        d["test_loss"] = e.test_loss;
        d["test_accuracy"] = e.test_accuracy;
        d["mean_lr"] = e.mean_lr;
        epochs.append(d);
    }
    py::dict thresholds;
    for (std::size_t k = 0; k < kAccuracyThresholds.size(); ++k) {
        thresholds[py::float_(kAccuracyThresholds[k])] = optional_epoch(h.threshold_epochs[k]);
    }
    py::list trace;
    for (const auto& row : h.trace) {
        py::dict d;
        d["step"] = row.step;
        d["phase"] = static_cast<int>(row.phase);
        d["lr"] = row.lr;
        d["alpha"] = row.alpha;
        d["trust"] = row.trust;
        trace.append(d);
    }
    py::dict out;
    out["strategy"] = h.strategy;
    out["epochs"] = epochs;
    out["best_accuracy"] = h.best_accuracy;
    out["threshold_epochs"] = thresholds;
    out["wall_seconds"] = h.wall_seconds;
    out["trace"] = trace;
    return out;
}

}  // namespace

PYBIND11_MODULE(_lrbench, m) {
    m.doc() = "Learning-rate strategy benchmark: schedules, optimizers, DALS and the synthetic task.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<RunFailure>(m, "RunFailure", PyExc_RuntimeError);

    m.def("roster", [] {
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        for (const auto& e : roster()) out.emplace_back(e.name, e.display, e.generation);
        return out;
    }, "The 18 strategies as (name, display label, generation) in table order.");

    m.def(
        "defaults",
        [] {
            const Defaults d;
            return std::map<std::string, double>(d.values().begin(), d.values().end());
        },
        "Built-in hyperparameter table.");

    m.def(
        "generate_data",
        [](std::uint64_t seed, std::size_t n_samples, double noise_sigma) {
            DataConfig cfg;
            cfg.seed = seed;
            cfg.n_samples = n_samples;
            cfg.noise_sigma = noise_sigma;
            const Dataset d = generate(cfg);
            py::dict out;
            out["train_x"] = to_numpy(d.train_x);
            out["train_y"] = to_numpy(d.train_y);
            out["test_x"] = to_numpy(d.test_x);
            out["test_y"] = to_numpy(d.test_y);
            return out;
        },
        py::arg("seed") = 42, py::arg("n_samples") = 8000, py::arg("noise_sigma") = 0.1,
        "Synthetic Gaussian-mixture classification data as numpy arrays.");

    m.def(
        "schedule",
        [](const std::string& kind, double t, double eta_max, double eta_min, double total_steps, double step_size,
           double gamma, double restart_period, double restart_mult, double cut_frac, double ratio,
           double warmup_steps) {
            static const std::map<std::string, ScheduleKind> kinds{
                {"fixed", ScheduleKind::fixed},   {"step", ScheduleKind::step}, {"cosine", ScheduleKind::cosine},
                {"sgdr", ScheduleKind::sgdr},     {"stlr", ScheduleKind::stlr},
                {"warmup_cosine", ScheduleKind::warmup_cosine}};
            const auto it = kinds.find(kind);
            if (it == kinds.end()) throw ConfigError("unknown schedule '" + kind + "'");
            ScheduleConfig c;
            c.kind = it->second;
            c.eta_max = eta_max;
            c.eta_min = eta_min;
            c.total_steps = total_steps;
            c.step_size = step_size;
            c.gamma = gamma;
            c.restart_period = restart_period;
            c.restart_mult = restart_mult;
            c.cut_frac = cut_frac;
            c.ratio = ratio;
            c.warmup_steps = warmup_steps;
            c.validate();
            return schedule_value(t, c);
        },
        py::arg("kind"), py::arg("t"), py::kw_only(), py::arg("eta_max") = 1.0, py::arg("eta_min") = 0.0,
        py::arg("total_steps") = 1.0, py::arg("step_size") = 1.0, py::arg("gamma") = 0.1,
        py::arg("restart_period") = 1.0, py::arg("restart_mult") = 1.0, py::arg("cut_frac") = 0.1,
        py::arg("ratio") = 32.0, py::arg("warmup_steps") = 0.0, "Learning rate of a schedule at step t.");

    m.def("discriminative_rates", &discriminative_rates, py::arg("eta_top"), py::arg("delta"), py::arg("n_layers"));

    m.def(
        "adaptive_alpha", [](int phase, double alpha0) {
            if (phase < 0 || phase > 2) throw ConfigError("phase must be 0, 1 or 2");
            return adaptive_alpha(static_cast<Phase>(phase), alpha0);
        },
        py::arg("phase"), py::arg("alpha0") = 0.6);
    m.def("trust_ratio", py::overload_cast<double, double>(&trust_ratio), py::arg("param_norm"),
          py::arg("grad_norm"));
    m.def(
        "depth_blend",
        [](const std::vector<double>& g, const std::vector<double>& g_ema, double depth) {
            return depth_blend(g, g_ema, depth);
        },
        py::arg("grad"), py::arg("grad_ema"), py::arg("depth_ratio"));

    py::class_<PhaseDetector>(m, "PhaseDetector")
        .def(py::init<>())
        .def("update", [](PhaseDetector& d, double loss) { return static_cast<int>(d.update(loss)); },
             py::arg("batch_loss"))
        .def_property_readonly("phase", [](const PhaseDetector& d) { return static_cast<int>(d.phase()); })
        .def_property_readonly("improvement", &PhaseDetector::improvement)
        .def_property_readonly("loss_ema", &PhaseDetector::loss_ema);

    m.def(
        "train",
        [](const std::string& strategy, std::size_t epochs, std::size_t batch_size, std::uint64_t seed,
           std::size_t n_samples, bool trace, const std::map<std::string, double>& overrides) {
            const RunConfig cfg = make_run(strategy, epochs, batch_size, seed, n_samples, trace, overrides);
            RunHistory h;
            {
                py::gil_scoped_release release;
                h = train_run(cfg);
            }
            return history_dict(h);
        },
        py::arg("strategy"), py::kw_only(), py::arg("epochs") = 80, py::arg("batch_size") = 64,
        py::arg("seed") = 42, py::arg("n_samples") = 8000, py::arg("trace") = false,
        py::arg("overrides") = std::map<std::string, double>{},
        "Train the benchmark MLP with one roster strategy and return its history.");

    m.def(
        "benchmark",
        [](const std::vector<std::string>& strategies, std::size_t epochs, std::uint64_t seed, std::size_t n_samples,
           std::size_t jobs, const std::string& format) {
            if (format != "csv" && format != "markdown") throw ConfigError("format must be csv or markdown");
            std::vector<RunConfig> runs;
            for (const auto& name : strategies) runs.push_back(make_run(name, epochs, 64, seed, n_samples, false, {}));
            std::vector<BenchmarkReport> reports(1);
            {
                py::gil_scoped_release release;
                reports[0] = run_benchmark(runs, jobs);
            }
            const auto rows = summarize(reports);
            return render(rows, format == "csv" ? ReportFormat::csv : ReportFormat::markdown);
        },
        py::arg("strategies"), py::kw_only(), py::arg("epochs") = 80, py::arg("seed") = 42,
        py::arg("n_samples") = 8000, py::arg("jobs") = 1, py::arg("format") = "csv",
        "Run several strategies and render the summary table.");
}
