#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "agingkit/cli.hpp"
#include "agingkit/error.hpp"
#include "agingkit/fitting.hpp"
#include "agingkit/model.hpp"
#include "agingkit/normalize.hpp"
#include "agingkit/simulator.hpp"
#include "agingkit/smoothing.hpp"

namespace py = pybind11;
using namespace agingkit;

namespace {

sim::SimConfig config_from_dict(const py::dict& values) {
    std::ostringstream text;
    for (const auto& [key, value] : values) {
        text << py::str(key).cast<std::string>() << " = " << py::repr(value).cast<std::string>() << '\n';
    }
    std::istringstream in(text.str());
    return sim::parse_sim_config(in, "<dict>");
}

py::dict config_to_dict(const sim::SimConfig& cfg) {
    std::ostringstream text;
    sim::write_sim_config(text, cfg);
    std::istringstream in(text.str());
    py::dict out;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (line.empty() || line[0] == '#' || eq == std::string::npos) {
            continue;
        }
        const std::string key = line.substr(0, line.find_first_of(" ="));
        const std::string value = line.substr(eq + 1);
        const bool integral = value.find_first_of(".eEn") == std::string::npos;
        out[py::str(key)] = integral ? py::object(py::int_(std::stoll(value))) : py::object(py::float_(std::stod(value)));
    }
    return out;
}

py::dict trace_to_dict(const sim::SimTrace& trace) {
    std::vector<std::int64_t> tick;
    std::vector<double> cache, ws, queue, block, bw, sfr;
    std::vector<bool> active;
    for (const auto& s : trace) {
        const auto r = s.record();
        tick.push_back(r.tick);
        cache.push_back(r.cache_mb);
        ws.push_back(r.working_set_mb);
        queue.push_back(r.disk_queue_len);
        block.push_back(r.block_kb);
        bw.push_back(r.bandwidth_kbyte);
        sfr.push_back(r.sfr_mb);
        active.push_back(s.policy_active);
    }
    py::dict out;
    out["tick"] = tick;
    out["cache_mb"] = cache;
    out["working_set_mb"] = ws;
    out["disk_queue_len"] = queue;
    out["block_kb"] = block;
    out["bandwidth_kbyte"] = bw;
    out["sfr_mb"] = sfr;
    out["policy_active"] = active;
    return out;
}

sim::SimConfig resolve_config(const py::object& config) {
    if (config.is_none()) {
        return {};
    }
    if (py::isinstance<sim::SimConfig>(config)) {
        return config.cast<sim::SimConfig>();
    }
    if (py::isinstance<py::dict>(config)) {
        return config_from_dict(config.cast<py::dict>());
    }
    return sim::load_sim_config(config.cast<std::filesystem::path>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Software aging toolkit: LOWESS, aging curves, feedback-loop model fitting, server simulator.";

    auto base = py::register_exception<Error>(m, "AgingError", PyExc_ValueError);
    py::register_exception<InputError>(m, "InputError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());

    m.def(
        "lowess",
        [](const std::vector<double>& x, const std::vector<double>& y, double fraction, int iterations) {
            return lowess(x, y, {fraction, iterations});
        },
        py::arg("x"), py::arg("y"), py::arg("fraction") = 0.3, py::arg("iterations") = 0);

    m.def(
        "normalize",
        [](const std::vector<double>& values, const std::string& orientation) {
            return normalize_only(values, parse_orientation(orientation));
        },
        py::arg("values"), py::arg("orientation") = "higher");

    m.def(
        "aging_curve",
        [](const std::vector<double>& t, const std::vector<double>& values, const std::string& orientation,
           double fraction, int iterations) {
            if (t.size() != values.size()) {
                throw DomainError("t and values differ in length");
            }
            std::vector<Sample> samples;
            for (std::size_t i = 0; i < t.size(); ++i) {
                samples.push_back({t[i], values[i]});
            }
            const MetricSeries series("series", "", parse_orientation(orientation), std::move(samples));
            const auto curve = to_aging_curve(series, {fraction, iterations});
            return py::make_tuple(curve.times(), curve.degrees());
        },
        py::arg("t"), py::arg("values"), py::arg("orientation") = "higher", py::arg("fraction") = 0.3,
        py::arg("iterations") = 0, "Smoothed, normalized aging degree; returns (t, y) with t > 0.");

    m.def(
        "eval_model",
        [](double K, double alpha, double beta, const std::vector<double>& t) {
            const FeedbackLoopModel model{K, alpha, beta};
            std::vector<double> out;
            out.reserve(t.size());
            for (double v : t) {
                out.push_back(eval_model(model, v));
            }
            return out;
        },
        py::arg("K"), py::arg("alpha"), py::arg("beta"), py::arg("t"));

    m.def(
        "ode_residual",
        [](double K, double alpha, double beta, const std::vector<double>& t) {
            return ode_residual({K, alpha, beta}, t);
        },
        py::arg("K"), py::arg("alpha"), py::arg("beta"), py::arg("t"));

    m.def("rmse", [](const std::vector<double>& o, const std::vector<double>& p) { return rmse(o, p); },
          py::arg("observed"), py::arg("predicted"));
    m.def("r_square", [](const std::vector<double>& o, const std::vector<double>& p) { return r_square(o, p); },
          py::arg("observed"), py::arg("predicted"));

    py::class_<FitReport>(m, "FitReport")
        .def_readonly("name", &FitReport::name)
        .def_property_readonly("K", [](const FitReport& r) { return r.model.K; })
        .def_property_readonly("alpha", [](const FitReport& r) { return r.model.alpha; })
        .def_property_readonly("beta", [](const FitReport& r) { return r.model.beta; })
        .def_readonly("rmse", &FitReport::rmse)
        .def_readonly("r_square", &FitReport::r_square)
        .def_readonly("n_samples", &FitReport::n_samples)
        .def_readonly("converged", &FitReport::converged)
        .def_readonly("iterations", &FitReport::iterations)
        .def_readonly("objective_history", &FitReport::objective_history)
        .def("row", &format_fit_row)
        .def("__repr__", [](const FitReport& r) { return "FitReport(" + format_fit_row(r) + ")"; });

    m.def(
        "fit",
        [](const std::vector<double>& t, const std::vector<double>& y, int max_iterations, double tolerance,
           std::string name) {
            FitOptions options;
            options.max_iterations = max_iterations;
            options.tolerance = tolerance;
            return fit(t, y, options, std::move(name));
        },
        py::arg("t"), py::arg("y"), py::arg("max_iterations") = 200, py::arg("tolerance") = 1e-10,
        py::arg("name") = "");

    py::class_<sim::WorkloadSpec>(m, "Workload")
        .def_readonly("client_count", &sim::WorkloadSpec::client_count)
        .def_property_readonly("file_dist", [](const sim::WorkloadSpec& w) { return static_cast<int>(w.file_dist); })
        .def_readonly("file_object", &sim::WorkloadSpec::file_object)
        .def_readonly("file_max_object", &sim::WorkloadSpec::file_max_object)
        .def_readonly("sleep_time_ms", &sim::WorkloadSpec::sleep_time_ms)
        .def_property_readonly("file_difference",
                               [](const sim::WorkloadSpec& w) { return static_cast<int>(w.file_difference); })
        .def("__eq__", [](const sim::WorkloadSpec& a, const sim::WorkloadSpec& b) { return a == b; })
        .def("__str__", &sim::format_workload)
        .def("__repr__", [](const sim::WorkloadSpec& w) { return "Workload" + sim::format_workload(w); });
    m.def("parse_workload", &sim::parse_workload, py::arg("text"));
    m.attr("WORKLOAD_L1") = sim::kWorkloadL1;
    m.attr("WORKLOAD_L2") = sim::kWorkloadL2;

    py::class_<sim::SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_static("from_dict", &config_from_dict, py::arg("values"))
        .def_static("load", &sim::load_sim_config, py::arg("path"))
        .def("to_dict", &config_to_dict);

    m.def(
        "simulate",
        [](const std::string& workload, const std::string& policy, double trigger, std::int64_t ticks,
           std::uint64_t seed, const py::object& config) {
            const auto cfg = resolve_config(config);
            return trace_to_dict(
                sim::run(cfg, sim::parse_workload(workload), sim::parse_policy(policy, trigger), ticks, seed));
        },
        py::arg("workload"), py::arg("policy") = "none", py::arg("trigger") = 0.5, py::arg("ticks") = 4000,
        py::arg("seed") = 1, py::arg("config") = py::none(),
        "Runs the simulator; returns a dict of per-tick columns.");

    m.def(
        "rejuvenate",
        [](const std::string& workload, const std::string& policy, std::int64_t at, double trigger,
           std::int64_t ticks, std::uint64_t seed, const py::object& config) {
            const auto cfg = resolve_config(config);
            const auto e = sim::apply_policy_experiment(cfg, sim::parse_workload(workload),
                                                        sim::parse_policy(policy, trigger), ticks, at, seed);
            return trace_to_dict(e.joined());
        },
        py::arg("workload"), py::arg("policy"), py::arg("at"), py::arg("trigger") = 0.5, py::arg("ticks") = 4000,
        py::arg("seed") = 1, py::arg("config") = py::none(),
        "Runs without a policy up to tick `at`, then with it; returns per-tick columns.");

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            std::ostringstream out, err;
            const int code = run_cli(std::move(args), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line in-process; returns (exit_code, stdout, stderr).");
}
