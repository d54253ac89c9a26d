#include "cascade_branch/cli.hpp"

#include "cascade_branch/error.hpp"
#include "cascade_branch/estimator.hpp"
#include "cascade_branch/events.hpp"
#include "cascade_branch/forest.hpp"
#include "cascade_branch/metrics.hpp"
#include "cascade_branch/series.hpp"
#include "cascade_branch/simulator.hpp"
#include "cascade_branch/svg.hpp"
#include "cascade_branch/temporal.hpp"
#include "output_stage.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <locale>
#include <optional>
#include <sstream>

namespace cascade_branch::cli {

namespace {

struct InputOptions {
    std::string events;
    std::string from_series;
    std::string from_matrix;
    std::string orphans = "reject";
};

struct SearchOptions {
    SearchConfig config;
    double n_min = 0.0; // 0 = observed prefix cumulative
    bool n_linear = false;
};

struct TemporalOptions {
    std::string period = "1d";
    int window = 3;
    std::vector<int> generations;
};

struct RunConfig {
    std::string out_dir = "out";
    InputOptions input;
    SearchOptions search;
    TemporalOptions temporal;
    double tol = 0.0;
    int k = 0;
    bool svg = false;

    SimParams sim;
    std::string sim_out;
    std::string match_series;
    std::string match_matrix;
    int campaign_periods = 31;
    int compare_runs = 0;
    std::string config_file;
};

std::ostringstream text_stream()
{
    std::ostringstream s;
    s.imbue(std::locale::classic());
    return s;
}

template <typename Fn>
std::string render(Fn&& fn)
{
    auto s = text_stream();
    fn(s);
    return s.str();
}

OrphanPolicy orphan_policy(const std::string& name)
{
    return name == "as-seeds" ? OrphanPolicy::AsSeeds : OrphanPolicy::Reject;
}

SearchConfig search_config(const SearchOptions& opts)
{
    SearchConfig c = opts.config;
    if (opts.n_min > 0.0)
        c.n_min = opts.n_min;
    c.n_log_spaced = !opts.n_linear;
    c.validate();
    return c;
}

struct LoadedEvents {
    ParsedEvents parsed;
    CascadeForest forest;
    GenerationSeries series;
};

LoadedEvents load_events(const InputOptions& in, std::ostream& err)
{
    LoadedEvents loaded{parse_events_file(in.events), {}, {}};
    for (const auto& d : loaded.parsed.diagnostics)
        err << fmt::format("{}:{}: MalformedLine: {}\n", in.events, d.line, d.message);
    loaded.forest = build_forest(loaded.parsed.log, orphan_policy(in.orphans));
    loaded.series = generation_counts(loaded.forest);
    return loaded;
}

std::string join_ints(const std::vector<int>& v)
{
    return v.empty() ? std::string("none") : fmt::format("{}", fmt::join(v, ","));
}

std::string summary_text(const CampaignSummary& s, const LoadedEvents* events)
{
    std::string text = fmt::format("reach: {}\ngenerations: {}\nsuper_critical: {}\ncritical: {}\n", s.reach,
                                   s.generations, join_ints(s.super_critical), join_ints(s.critical));
    std::vector<std::string> ratios;
    for (const auto& r : s.etp_ratios)
        ratios.push_back(r ? fmt::format("{:.4f}", *r) : std::string("n/a"));
    text += fmt::format("etp_ratios: {}\n", ratios.empty() ? std::string("none") : fmt::format("{}", fmt::join(ratios, ",")));
    if (events) {
        text += fmt::format("events: {}\nmalformed_lines: {}\norphans: {}\npromoted_seeds: {}\n",
                            events->parsed.log.size(), events->parsed.diagnostics.size(),
                            events->forest.orphan_records().size(), events->forest.promoted_seeds());
        std::size_t attempts = 0;
        for (const auto& [id, n] : events->forest.attempt_counts())
            attempts += n;
        text += fmt::format("repeat_attempts: {}\n", attempts);
    }
    return text;
}

// -- stage writers shared by the individual commands and `report` ----------

void stage_stats(OutputStage& stage, const GenerationSeries& series, double tol, const LoadedEvents* events,
                 std::ostream& out)
{
    const auto params = epidemic_params(series, tol);
    const auto summary = campaign_summary(series, params);
    stage.write("series.csv", render([&](std::ostream& s) { write_series(s, series); }));
    stage.write("metrics.csv", render([&](std::ostream& s) { write_metrics_report(s, series, params); }));
    const auto text = summary_text(summary, events);
    stage.write("summary.txt", text);
    out << text;
}

void stage_fit(OutputStage& stage, const GenerationSeries& series, const SearchConfig& config, int k, bool svg)
{
    FitReport report;
    report.actual_reach = static_cast<double>(series.reach());
    if (k > 0)
        report.rows.push_back(evaluate(fit(series, k, config), series));
    else
        report = sweep(series, config);

    stage.write("fit_report.csv", render([&](std::ostream& s) { write_fit_report(s, report); }));
    stage.write("reach_error_curve.csv", render([&](std::ostream& s) { write_reach_error_curve(s, report); }));
    stage.write("fit_params.csv", render([&](std::ostream& s) { write_fit_params(s, report); }));
    if (svg) {
        LineChart chart{"Reach error by generations used", "generations used (k)", "reach error [%]", {}};
        LineSeries line{"reach error", {}};
        for (const auto& r : report.rows)
            line.points.emplace_back(r.k, r.reach_error_pct * 100.0);
        chart.series.push_back(std::move(line));
        stage.write("reach_error_curve.svg", render_svg(chart));
    }
}

void stage_temporal(OutputStage& stage, const PeriodMatrix& matrix, const CascadeForest* forest,
                    const TemporalOptions& opts, bool svg)
{
    std::vector<int> gens = opts.generations;
    if (gens.empty())
        for (int g = 1; g <= matrix.generations(); ++g)
            gens.push_back(g);
    const auto curves = cumulative_by_generation(matrix, gens);
    const auto stable = stabilization(matrix, opts.window);

    stage.write("period_matrix.csv", render([&](std::ostream& s) { write_period_matrix(s, matrix); }));
    stage.write("cumulative_curves.csv", render([&](std::ostream& s) { write_cumulative_curves(s, gens, curves); }));
    stage.write("stabilization.csv", render([&](std::ostream& s) { write_stabilization(s, stable); }));

    std::optional<std::vector<std::int64_t>> first;
    if (forest) {
        first = first_occurrence(*forest);
        stage.write("first_occurrence.csv", render([&](std::ostream& s) { write_first_occurrence(s, *first); }));
    }
    if (svg) {
        LineChart chart{"Cumulative infections per generation", "period", "infections", {}};
        for (std::size_t i = 0; i < gens.size(); ++i) {
            LineSeries line{fmt::format("G{}", gens[i]), {}};
            for (std::size_t t = 0; t < curves[i].size(); ++t)
                line.points.emplace_back(static_cast<double>(t + 1), static_cast<double>(curves[i][t]));
            chart.series.push_back(std::move(line));
        }
        stage.write("cumulative_curves.svg", render_svg(chart));
        if (first) {
            LineChart fo{"First occurrence of each generation", "minutes since launch", "generation", {}};
            LineSeries line{"first node", {}};
            for (std::size_t g = 0; g < first->size(); ++g)
                line.points.emplace_back(static_cast<double>((*first)[g]) / 60.0, static_cast<double>(g + 1));
            fo.series.push_back(std::move(line));
            stage.write("first_occurrence.svg", render_svg(fo));
        }
    }
}

// -- option registration ----------------------------------------------------

void add_search_flags(CLI::App* cmd, RunConfig& cfg)
{
    auto& c = cfg.search.config;
    cmd->add_option("--r0-min", c.r0_min, "Lower end of the r0 grid")->capture_default_str();
    cmd->add_option("--r0-max", c.r0_max, "Upper end of the r0 grid")->capture_default_str();
    cmd->add_option("--r0-steps", c.r0_steps, "Points on the r0 grid")->capture_default_str();
    cmd->add_option("--n-min", cfg.search.n_min, "Lower end of the N grid (0 = observed cumulative at k)")
        ->capture_default_str();
    cmd->add_option("--n-max", c.n_max, "Upper end of the N grid")->capture_default_str();
    cmd->add_option("--n-steps", c.n_steps, "Points on the N grid")->capture_default_str();
    cmd->add_flag("--n-linear", cfg.search.n_linear, "Space the N grid linearly instead of logarithmically");
    cmd->add_option("--refine-rounds", c.refine_rounds, "Local refinement rounds")->capture_default_str();
    cmd->add_option("--refine-shrink", c.refine_shrink, "Range shrink factor per refinement round")
        ->capture_default_str();
    cmd->add_option("--threads", c.threads, "Worker threads (0 = CASCADE_BRANCH_THREADS or all cores)")
        ->capture_default_str();
}

void add_temporal_flags(CLI::App* cmd, RunConfig& cfg)
{
    cmd->add_option("--period", cfg.temporal.period, "Period length: seconds or with s/m/h/d/w suffix")
        ->capture_default_str();
    cmd->add_option("--window", cfg.temporal.window, "Quiet periods required before a generation is stable")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--generations", cfg.temporal.generations, "Generations for cumulative curves (default all)")
        ->delimiter(',');
}

void add_common(CLI::App* cmd, RunConfig& cfg)
{
    cmd->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--orphans", cfg.input.orphans, "Orphan events: reject or as-seeds")
        ->check(CLI::IsMember({"reject", "as-seeds"}))
        ->capture_default_str();
    cmd->add_flag("--svg", cfg.svg, "Also write SVG line charts");
    cmd->add_option("--config", cfg.config_file, "Flat key=value file with flag values; command-line flags win");
}

bool is_false(std::string v)
{
    for (auto& c : v)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return v == "false" || v == "0" || v == "no" || v == "off";
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Splices `--config FILE` entries in as flags. Flags already on the command
// line take precedence; `[section]` headers are ignored.
std::vector<std::string> expand_config(const std::vector<std::string>& args)
{
    std::string path;
    std::size_t at = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            at = i;
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            at = i;
            break;
        }
    }
    if (at == args.size())
        return args;

    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::Io, fmt::format("cannot open config file '{}'", path));
    auto given = [&](const std::string& flag) {
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0)
                return true;
        return false;
    };

    std::vector<std::string> extra;
    std::string line;
    for (int line_no = 1; std::getline(in, line); ++line_no) {
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::InvalidParams, fmt::format("{}:{}: expected key=value", path, line_no));
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        while (!key.empty() && key[0] == '-')
            key.erase(0, 1);
        std::replace(key.begin(), key.end(), '_', '-');
        const std::string flag = "--" + key;
        if (key == "config" || given(flag))
            continue;
        if (key == "svg" || key == "n-linear") {
            if (!is_false(value))
                extra.push_back(flag);
            continue;
        }
        extra.push_back(flag + "=" + value);
    }

    std::vector<std::string> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i == at) {
            if (args[i] == "--config")
                ++i;
            continue;
        }
        out.push_back(args[i]);
    }
    out.insert(out.end(), extra.begin(), extra.end());
    return out;
}

int fail(std::ostream& err, const std::string& message)
{
    err << "error: " << message << '\n';
    return 1;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    CLI::App app{"Branching-process analysis of viral campaigns", "cascade_branch"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    auto* stats = app.add_subcommand("stats", "Per-generation counts, p, lambda, ETP and criticality");
    auto* stats_src = stats->add_option_group("input");
    stats_src->add_option("--events", cfg.input.events, "Event CSV")->check(CLI::ExistingFile);
    stats_src->add_option("--from-series", cfg.input.from_series, "GenerationSeries CSV")->check(CLI::ExistingFile);
    stats_src->require_option(1);
    stats->add_option("--tol", cfg.tol, "Criticality tolerance around ETP = 1")->capture_default_str();
    add_common(stats, cfg);

    auto* fitc = app.add_subcommand("fit", "Fit the global branching model on generation prefixes");
    auto* fit_src = fitc->add_option_group("input");
    fit_src->add_option("--events", cfg.input.events, "Event CSV")->check(CLI::ExistingFile);
    fit_src->add_option("--from-series", cfg.input.from_series, "GenerationSeries CSV")->check(CLI::ExistingFile);
    fit_src->require_option(1);
    fitc->add_option("--k", cfg.k, "Fit only the first k generations (default: sweep k = 1..G)");
    add_search_flags(fitc, cfg);
    add_common(fitc, cfg);

    auto* temporal = app.add_subcommand("temporal", "Period x generation matrix, curves, first occurrence, stability");
    auto* tmp_src = temporal->add_option_group("input");
    tmp_src->add_option("--events", cfg.input.events, "Event CSV")->check(CLI::ExistingFile);
    tmp_src->add_option("--from-matrix", cfg.input.from_matrix, "PeriodMatrix CSV")->check(CLI::ExistingFile);
    tmp_src->require_option(1);
    add_temporal_flags(temporal, cfg);
    add_common(temporal, cfg);

    auto* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic campaign event log");
    auto& sp = cfg.sim;
    simulate_cmd->add_option("--p", sp.p, "Forwarding probability")->capture_default_str();
    simulate_cmd->add_option("--lambda", sp.lambda, "Mean contact attempts per forwarder")->capture_default_str();
    simulate_cmd->add_option("--n", sp.population, "Population size")->capture_default_str();
    simulate_cmd->add_option("--seeds", sp.seeds, "Initial seeds")->capture_default_str();
    simulate_cmd->add_option("--mean-delay", sp.mean_delay, "Mean transmission delay in seconds")->capture_default_str();
    simulate_cmd->add_option("--max-generations", sp.max_generations, "Deepest generation that still forwards")
        ->capture_default_str();
    simulate_cmd->add_option("--rng-seed", sp.rng_seed, "Random seed")->capture_default_str();
    simulate_cmd->add_option("--start-time", sp.start_time, "Epoch seconds of the first seed")->capture_default_str();
    simulate_cmd->add_option("--match-series", cfg.match_series,
                             "Reconstruct events matching this GenerationSeries instead of simulating")
        ->check(CLI::ExistingFile);
    simulate_cmd->add_option("--match-matrix", cfg.match_matrix, "PeriodMatrix constraining reconstructed timing")
        ->check(CLI::ExistingFile);
    simulate_cmd->add_option("--campaign-periods", cfg.campaign_periods,
                             "Periods spanned by a reconstructed campaign")
        ->capture_default_str();
    simulate_cmd->add_option("--compare-runs", cfg.compare_runs,
                             "Write a simulated-vs-projected comparison over this many runs instead of events");
    simulate_cmd->add_option("--out", cfg.sim_out, "Output file")->required();
    simulate_cmd->add_option("--config", cfg.config_file,
                             "Flat key=value file with flag values; command-line flags win");

    auto* report = app.add_subcommand("report", "stats + fit + temporal into one directory with a manifest");
    report->add_option("--events", cfg.input.events, "Event CSV")->required()->check(CLI::ExistingFile);
    report->add_option("--tol", cfg.tol, "Criticality tolerance around ETP = 1")->capture_default_str();
    add_search_flags(report, cfg);
    add_temporal_flags(report, cfg);
    add_common(report, cfg);

    std::vector<std::string> expanded;
    try {
        expanded = expand_config(args);
    } catch (const Error& e) {
        return fail(err, e.what());
    }
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (stats->parsed()) {
            OutputStage stage(cfg.out_dir);
            if (!cfg.input.events.empty()) {
                const auto loaded = load_events(cfg.input, err);
                stage_stats(stage, loaded.series, cfg.tol, &loaded, out);
            } else {
                stage_stats(stage, read_series_file(cfg.input.from_series), cfg.tol, nullptr, out);
            }
            stage.commit();
        } else if (fitc->parsed()) {
            const auto config = search_config(cfg.search);
            const auto series = cfg.input.events.empty() ? read_series_file(cfg.input.from_series)
                                                         : load_events(cfg.input, err).series;
            OutputStage stage(cfg.out_dir);
            stage_fit(stage, series, config, cfg.k, cfg.svg);
            stage.commit();
            out << fmt::format("wrote {} fit row(s) to {}\n", cfg.k > 0 ? 1 : series.generations(), cfg.out_dir);
        } else if (temporal->parsed()) {
            const auto period = parse_period(cfg.temporal.period);
            OutputStage stage(cfg.out_dir);
            if (!cfg.input.events.empty()) {
                const auto loaded = load_events(cfg.input, err);
                stage_temporal(stage, period_generation_matrix(loaded.forest, period), &loaded.forest, cfg.temporal,
                               cfg.svg);
            } else {
                stage_temporal(stage, read_period_matrix_file(cfg.input.from_matrix), nullptr, cfg.temporal, cfg.svg);
            }
            stage.commit();
            out << fmt::format("wrote temporal analysis to {}\n", cfg.out_dir);
        } else if (simulate_cmd->parsed()) {
            std::string content;
            if (!cfg.match_series.empty()) {
                std::optional<PeriodMatrix> matrix;
                if (!cfg.match_matrix.empty())
                    matrix = read_period_matrix_file(cfg.match_matrix);
                ReconstructOptions opts;
                opts.rng_seed = sp.rng_seed;
                opts.start_time = sp.start_time;
                opts.mean_delay = sp.mean_delay;
                opts.campaign_periods = cfg.campaign_periods;
                const auto log = reconstruct_campaign(read_series_file(cfg.match_series), matrix, opts);
                content = to_csv(log, fmt::format("reconstructed series={} matrix={} rng_seed={} start_time={} rng={}",
                                                  cfg.match_series, cfg.match_matrix.empty() ? "none" : cfg.match_matrix,
                                                  sp.rng_seed, sp.start_time, kRngAlgorithm));
            } else if (cfg.compare_runs > 0) {
                const auto table = empirical_vs_expected(sp, cfg.compare_runs);
                content = render([&](std::ostream& s) {
                    s << "# " << sp.describe() << " runs=" << table.runs << '\n';
                    s << fmt::format("# empirical_mean_reach={:.6f} expected_reach={:.6f}\n", table.empirical_mean_reach,
                                     table.expected_reach);
                    write_comparison(s, table);
                });
            } else {
                content = to_csv(simulate(sp), sp.describe());
            }
            write_file_atomically(cfg.sim_out, content);
            out << fmt::format("wrote {}\n", cfg.sim_out);
        } else if (report->parsed()) {
            const auto config = search_config(cfg.search);
            const auto period = parse_period(cfg.temporal.period);
            const auto loaded = load_events(cfg.input, err);
            OutputStage stage(cfg.out_dir);
            stage_stats(stage, loaded.series, cfg.tol, &loaded, out);
            stage_fit(stage, loaded.series, config, cfg.k, cfg.svg);
            stage_temporal(stage, period_generation_matrix(loaded.forest, period), &loaded.forest, cfg.temporal,
                           cfg.svg);

            nlohmann::ordered_json manifest;
            manifest["tool"] = "cascade_branch";
            manifest["command"] = "report";
            manifest["period_seconds"] = period;
            manifest["window"] = cfg.temporal.window;
            manifest["rng"] = kRngAlgorithm;
            manifest["files"] = nlohmann::json::array();
            for (const auto& name : stage.files()) {
                std::ifstream in(stage.staged_path(name), std::ios::binary);
                const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
                manifest["files"].push_back({{"name", name}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
            }
            stage.write("manifest.json", manifest.dump(2) + "\n");
            stage.commit();
        }
    } catch (const Error& e) {
        return fail(err, e.what());
    } catch (const std::exception& e) {
        return fail(err, e.what());
    }
    return 0;
}

int run(int argc, const char* const* argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

} // namespace cascade_branch::cli
