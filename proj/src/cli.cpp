#include "agingkit/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "agingkit/chart.hpp"
#include "agingkit/csv.hpp"
#include "agingkit/error.hpp"
#include "agingkit/fitting.hpp"
#include "agingkit/normalize.hpp"
#include "agingkit/simulator.hpp"
#include "agingkit/smoothing.hpp"
#include "agingkit/timeseries.hpp"

namespace agingkit {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Shared helpers

void require_input_file(const fs::path& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        throw InputError("cannot read input file " + path.string());
    }
}

void require_output_dir(const fs::path& path) {
    const auto parent = path.parent_path();
    std::error_code ec;
    if (!parent.empty() && !fs::is_directory(parent, ec)) {
        throw InputError("output directory does not exist: " + parent.string());
    }
}

void require_fraction(double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw DomainError("fraction out of range (0, 1]: " + csv::format_number(fraction));
    }
}

double parse_time_scale(const std::string& text) {
    std::optional<double> value;
    if (const auto slash = text.find('/'); slash != std::string::npos) {
        const auto num = csv::parse_number(std::string_view(text).substr(0, slash));
        const auto den = csv::parse_number(std::string_view(text).substr(slash + 1));
        if (num && den) {
            if (*den == 0.0) {
                throw DomainError("time scale divides by zero");
            }
            value = *num / *den;
        }
    } else {
        value = csv::parse_number(text);
    }
    if (!value) {
        throw InputError("time scale must be a number or a ratio like 1/3600, got '" + text + "'");
    }
    if (!(*value > 0.0)) {
        throw DomainError("time scale must be positive");
    }
    return *value;
}

void write_text(const fs::path& path, const std::string& text) {
    csv::write_file_atomically(path, [&](std::ostream& o) { o << text; });
}

std::string first_line(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    std::string line;
    csv::read_line(in, line);
    if (line.starts_with("\xEF\xBB\xBF")) {
        line.erase(0, 3);
    }
    line.erase(std::remove_if(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t'; }), line.end());
    return line;
}

bool is_trace_file(const fs::path& path) { return first_line(path) == sim::kTraceHeader; }

std::vector<sim::TraceRecord> load_trace(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    return sim::parse_trace(in, path.string());
}

std::vector<double> ticks_of(std::span<const sim::TraceRecord> records) {
    std::vector<double> x;
    x.reserve(records.size());
    for (const auto& r : records) {
        x.push_back(static_cast<double>(r.tick));
    }
    return x;
}

std::vector<double> column_of(std::span<const sim::TraceRecord> records, double sim::TraceRecord::*field) {
    std::vector<double> y;
    y.reserve(records.size());
    for (const auto& r : records) {
        y.push_back(r.*field);
    }
    return y;
}

chart::Chart trace_chart(std::span<const sim::TraceRecord> records, const std::string& title,
                         std::optional<double> marker_tick) {
    using sim::TraceRecord;
    const auto x = ticks_of(records);
    chart::Chart c;
    c.title = title;
    c.x_label = "tick (15 s)";
    c.panels.push_back({"Bandwidth per player", "kbyte",
                        {{"bandwidth_kbyte", x, column_of(records, &TraceRecord::bandwidth_kbyte), "#1f77b4"}}});
    c.panels.push_back({"Memory",
                        "MB",
                        {{"working_set_mb", x, column_of(records, &TraceRecord::working_set_mb), "#2ca02c"},
                         {"cache_mb", x, column_of(records, &TraceRecord::cache_mb), "#ff7f0e"},
                         {"sfr_mb", x, column_of(records, &TraceRecord::sfr_mb), "#9467bd", true}}});
    c.panels.push_back({"Disk queue", "entries",
                        {{"disk_queue_len", x, column_of(records, &TraceRecord::disk_queue_len), "#8c564b"}}});
    c.panels.push_back(
        {"Disk block size", "KB", {{"block_kb", x, column_of(records, &TraceRecord::block_kb), "#7f7f7f"}}});
    if (marker_tick) {
        c.marker_x = *marker_tick;
        c.marker_label = "rejuvenation";
    }
    return c;
}

std::vector<sim::TraceRecord> records_of(const sim::SimTrace& trace) {
    std::vector<sim::TraceRecord> out;
    out.reserve(trace.size());
    for (const auto& s : trace) {
        out.push_back(s.record());
    }
    return out;
}

fs::path with_suffix(const fs::path& path, const std::string& suffix) {
    auto result = path.parent_path() / (path.stem().string() + suffix + path.extension().string());
    return result;
}

// ---------------------------------------------------------------------------
// smooth

struct SmoothArgs {
    std::string input;
    std::string output;
    std::vector<double> fractions;
    int iterations = 0;
};

int cmd_smooth(const SmoothArgs& a, std::ostream& out) {
    const std::vector<double> fractions = a.fractions.empty() ? std::vector<double>{0.3} : a.fractions;
    for (double f : fractions) {
        require_fraction(f);
    }
    if (a.iterations < 0) {
        throw DomainError("iterations must be nonnegative");
    }
    require_input_file(a.input);
    require_output_dir(a.output);

    const fs::path in_path(a.input);
    const auto series = load_series(in_path, in_path.stem().string(), Orientation::HigherIsWorse);
    for (double f : fractions) {
        const auto smoothed = lowess(series, SmoothingConfig{f, a.iterations});
        const fs::path target =
            fractions.size() == 1 ? fs::path(a.output) : with_suffix(a.output, "_f" + csv::format_number(f));
        csv::write_file_atomically(target, [&](std::ostream& o) { write_series(o, smoothed); });
        out << "wrote " << target.string() << " (" << smoothed.size() << " rows, fraction "
            << csv::format_number(f) << ")\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
    std::vector<std::string> inputs;
    std::string output;
    std::string orientation = "auto";
    std::string time_scale = "1/3600";
    std::string column = "bandwidth_kbyte";
    double fraction = 0.3;
    int iterations = 0;
    std::string svg;
};

MetricSeries load_fit_series(const fs::path& path, const FitArgs& a) {
    std::optional<Orientation> forced;
    if (a.orientation != "auto") {
        forced = parse_orientation(a.orientation);
    }
    if (is_trace_file(path)) {
        const auto records = load_trace(path);
        const auto column = sim::trace_column(records, a.column);
        return MetricSeries(path.stem().string(), column.unit(), forced.value_or(column.orientation()),
                            std::vector<Sample>(column.samples().begin(), column.samples().end()));
    }
    return load_series(path, path.stem().string(), forced.value_or(Orientation::HigherIsWorse));
}

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    require_fraction(a.fraction);
    if (a.iterations < 0) {
        throw DomainError("iterations must be nonnegative");
    }
    if (a.orientation != "auto") {
        parse_orientation(a.orientation);
    }
    const double scale = parse_time_scale(a.time_scale);
    for (const auto& in : a.inputs) {
        require_input_file(in);
    }
    if (!a.output.empty()) {
        require_output_dir(a.output);
    }
    if (!a.svg.empty()) {
        require_output_dir(a.svg);
    }

    std::vector<FitReport> reports;
    std::vector<AgingCurve> curves;
    for (const auto& in : a.inputs) {
        const auto series = rescale_time(load_fit_series(in, a), scale);
        curves.push_back(to_aging_curve(series, SmoothingConfig{a.fraction, a.iterations}));
        reports.push_back(fit(curves.back()));
    }

    for (const auto& r : reports) {
        if (!r.converged) {
            err << "warning: fit of " << r.name << " did not converge after " << r.iterations
                << " iterations; best parameters reported\n";
        }
    }

    if (a.output.empty()) {
        write_fit_report(out, reports);
    } else {
        csv::write_file_atomically(a.output, [&](std::ostream& o) { write_fit_report(o, reports); });
        std::ostringstream table;
        table << std::left << std::setw(20) << "name" << std::right << std::setw(14) << "K" << std::setw(14)
              << "alpha" << std::setw(14) << "beta" << std::setw(12) << "RMSE" << std::setw(12) << "R-square"
              << "  converged\n";
        for (const auto& r : reports) {
            table << std::left << std::setw(20) << r.name << std::right << std::setprecision(4) << std::setw(14)
                  << r.model.K << std::setw(14) << r.model.alpha << std::setw(14) << r.model.beta << std::setw(12)
                  << r.rmse << std::setw(12) << r.r_square << "  " << (r.converged ? "yes" : "NO") << '\n';
        }
        out << table.str();
    }

    if (!a.svg.empty()) {
        chart::Chart c;
        c.title = "Aging degree and fitted model";
        c.x_label = "t (scaled time)";
        for (std::size_t i = 0; i < reports.size(); ++i) {
            const auto t = curves[i].times();
            const auto y = curves[i].degrees();
            std::vector<double> fitted(t.size());
            std::vector<double> residual(t.size());
            for (std::size_t k = 0; k < t.size(); ++k) {
                fitted[k] = eval_model(reports[i].model, t[k]);
                residual[k] = y[k] - fitted[k];
            }
            const auto& name = reports[i].name;
            c.panels.push_back({name + ": curve fitting", "aging degree",
                                {{"observed", t, y, "#1f77b4"}, {"fitted", t, fitted, "#d62728", true}}});
            c.panels.push_back({name + ": model residual", "residual", {{"residual", t, residual, "#2ca02c"}}, true});
        }
        write_text(a.svg, chart::render_svg(c));
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate / rejuvenate

struct SimArgs {
    std::string config;
    std::string workload;
    std::string policy = "none";
    double trigger = 0.5;
    std::int64_t ticks = 4000;
    std::uint64_t seed = 1;
    std::string output;
    std::string svg;
    std::int64_t at = -1;
};

int cmd_simulate(const SimArgs& a, bool rejuvenate, std::ostream& out) {
    const auto load = sim::parse_workload(a.workload);
    const auto policy = sim::parse_policy(a.policy, a.trigger);
    if (!a.config.empty()) {
        require_input_file(a.config);
    }
    require_output_dir(a.output);
    if (!a.svg.empty()) {
        require_output_dir(a.svg);
    }
    const sim::SimConfig cfg = a.config.empty() ? sim::SimConfig{} : sim::load_sim_config(a.config);
    cfg.validate();
    load.validate(cfg);
    if (a.ticks < 1) {
        throw DomainError("ticks must be at least 1");
    }

    sim::SimTrace trace;
    std::optional<double> marker;
    if (rejuvenate) {
        trace = sim::apply_policy_experiment(cfg, load, policy, a.ticks, a.at, a.seed).joined();
        marker = static_cast<double>(a.at);
    } else {
        trace = sim::run(cfg, load, policy, a.ticks, a.seed);
    }
    csv::write_file_atomically(a.output, [&](std::ostream& o) { sim::write_trace(o, trace); });
    out << "wrote " << a.output << " (" << trace.size() << " rows, workload (" << sim::format_workload(load)
        << "), policy " << sim::format_policy(policy) << ")\n";

    if (!a.svg.empty()) {
        const auto title = "Workload (" + sim::format_workload(load) + "), policy " + sim::format_policy(policy);
        write_text(a.svg, chart::render_svg(trace_chart(records_of(trace), title, marker)));
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
    std::string input;
    std::string output;
    std::vector<std::string> columns;
    std::string title;
    std::optional<double> marker;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
    require_input_file(a.input);
    require_output_dir(a.output);
    const fs::path in_path(a.input);
    const auto title = a.title.empty() ? in_path.stem().string() : a.title;

    chart::Chart c;
    if (is_trace_file(in_path)) {
        const auto records = load_trace(in_path);
        if (a.columns.empty()) {
            c = trace_chart(records, title, a.marker);
        } else {
            c.title = title;
            c.x_label = "tick (15 s)";
            const auto x = ticks_of(records);
            for (const auto& col : a.columns) {
                const auto series = sim::trace_column(records, col);
                c.panels.push_back({col, series.unit(), {{col, x, series.values(), "#1f77b4"}}});
            }
            if (a.marker) {
                c.marker_x = *a.marker;
                c.marker_label = "rejuvenation";
            }
        }
    } else {
        if (!a.columns.empty()) {
            throw InputError("--column applies to trace files only");
        }
        const auto series = load_series(in_path, in_path.stem().string(), Orientation::HigherIsWorse);
        c.title = title;
        c.x_label = "t";
        c.panels.push_back({series.name(), "value", {{series.name(), series.times(), series.values(), "#1f77b4"}}});
        if (a.marker) {
            c.marker_x = *a.marker;
            c.marker_label = "marker";
        }
    }
    write_text(a.output, chart::render_svg(c));
    out << "wrote " << a.output << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Software aging analysis: smoothing, model fitting and feedback-loop simulation", "agingkit"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    SmoothArgs smooth;
    auto* s = app.add_subcommand("smooth", "LOWESS-smooth a t,value series");
    s->add_option("input", smooth.input, "Input series CSV")->required();
    s->add_option("-o,--output", smooth.output, "Output CSV (suffixed _f<fraction> when several fractions)")
        ->required();
    s->add_option("--fraction", smooth.fractions, "Share of samples per local regression; repeatable")
        ->expected(1, CLI::detail::expected_max_vector_size)
        ->take_all();
    s->add_option("--iterations", smooth.iterations, "Robustness passes")->capture_default_str();

    FitArgs fita;
    auto* f = app.add_subcommand("fit", "Fit K*exp(alpha*t)*t^beta to one or more series or traces");
    f->add_option("inputs", fita.inputs, "Series CSVs (t,value) or simulator trace CSVs")->required();
    f->add_option("-o,--output", fita.output, "Report CSV; printed to stdout when omitted");
    f->add_option("--orientation", fita.orientation, "auto, higher or lower")->capture_default_str();
    f->add_option("--time-scale", fita.time_scale, "Factor applied to t before fitting, e.g. 1/3600")
        ->capture_default_str();
    f->add_option("--column", fita.column, "Trace column used for trace inputs")->capture_default_str();
    f->add_option("--fraction", fita.fraction, "LOWESS fraction")->capture_default_str();
    f->add_option("--iterations", fita.iterations, "LOWESS robustness passes")->capture_default_str();
    f->add_option("--svg", fita.svg, "Chart of observed and fitted curves with residuals");

    SimArgs sima;
    SimArgs reja;
    auto add_sim_options = [](CLI::App* cmd, SimArgs& a) {
        cmd->add_option("--config", a.config, "Simulator config file (key = value)");
        cmd->add_option("--workload", a.workload, "Workload tuple, e.g. 600,0,100,20,1000,0")->required();
        cmd->add_option("--policy", a.policy, "none, cache-hit, probabilistic:P, block-reset, memreap:N")
            ->capture_default_str();
        cmd->add_option("--trigger", a.trigger, "Aging degree that activates the policy")->capture_default_str();
        cmd->add_option("--ticks", a.ticks, "Ticks to simulate (15 s each)")->capture_default_str();
        cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
        cmd->add_option("-o,--output", a.output, "Trace CSV")->required();
        cmd->add_option("--svg", a.svg, "Chart of bandwidth, memory, disk queue and block size");
    };
    auto* sim_cmd = app.add_subcommand("simulate", "Run the aging simulator");
    add_sim_options(sim_cmd, sima);
    auto* rej_cmd = app.add_subcommand("rejuvenate", "Run without a policy until --at, then with --policy");
    add_sim_options(rej_cmd, reja);
    rej_cmd->add_option("--at", reja.at, "Tick at which the policy is switched on")->required();

    ReportArgs repa;
    auto* r = app.add_subcommand("report", "Render a series or trace CSV as an SVG chart");
    r->add_option("input", repa.input, "Series or trace CSV")->required();
    r->add_option("-o,--output", repa.output, "SVG file")->required();
    r->add_option("--column", repa.columns, "Trace columns to plot (default: all)");
    r->add_option("--title", repa.title, "Chart title");
    r->add_option("--marker", repa.marker, "x position of a vertical marker");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }

    try {
        if (s->parsed()) {
            return cmd_smooth(smooth, out);
        }
        if (f->parsed()) {
            return cmd_fit(fita, out, err);
        }
        if (sim_cmd->parsed()) {
            return cmd_simulate(sima, false, out);
        }
        if (rej_cmd->parsed()) {
            return cmd_simulate(reja, true, out);
        }
        if (r->parsed()) {
            return cmd_report(repa, out);
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace agingkit
