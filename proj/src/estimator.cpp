#include "cascade_branch/estimator.hpp"

#include "cascade_branch/error.hpp"
#include "cascade_branch/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

#include <fmt/format.h>

namespace cascade_branch {

namespace {

struct Axis {
    double lo;
    double hi;
    int steps;
    bool log_spaced;

    double at(int i) const
    {
        if (steps == 1)
            return lo;
        const double t = static_cast<double>(i) / static_cast<double>(steps - 1);
        if (log_spaced)
            return std::pow(10.0, std::log10(lo) + t * (std::log10(hi) - std::log10(lo)));
        return lo + t * (hi - lo);
    }
};

struct Candidate {
    double mse;
    double r0;
    double n;
};

// Lexicographic (mse, r0, N): a total order, so the reduction result does
// not depend on how cells are split across threads.
bool better(const Candidate& a, const Candidate& b)
{
    if (a.mse != b.mse)
        return a.mse < b.mse;
    if (a.r0 != b.r0)
        return a.r0 < b.r0;
    return a.n < b.n;
}

double objective(const ObservedCurve& obs, int k, double r0, double n)
{
    const auto traj = project(ModelParams::from_r0(r0, n), obs.seeds(), {k, 0.5});
    return trajectory_mse(traj, obs.cumulative, k);
}

Candidate scan(const ObservedCurve& obs, int k, const Axis& r0_axis, const Axis& n_axis, int threads)
{
    const int workers = std::clamp(threads, 1, r0_axis.steps);
    std::vector<Candidate> local(static_cast<std::size_t>(workers),
                                 Candidate{std::numeric_limits<double>::infinity(), 0.0, 0.0});

    auto work = [&](int w) {
        auto& best = local[static_cast<std::size_t>(w)];
        for (int i = w; i < r0_axis.steps; i += workers) {
            const double r0 = r0_axis.at(i);
            for (int j = 0; j < n_axis.steps; ++j) {
                const double n = n_axis.at(j);
                const Candidate c{objective(obs, k, r0, n), r0, n};
                if (better(c, best))
                    best = c;
            }
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work, w);
        for (auto& t : pool)
            t.join();
    }
    return *std::min_element(local.begin(), local.end(), better);
}

double decision_rate(const ObservedCurve& obs, int k)
{
    if (obs.decisions.empty())
        return 1.0;
    const auto n = static_cast<std::size_t>(k);
    const double decided = std::accumulate(obs.decisions.begin(), obs.decisions.begin() + n, 0.0);
    const double infected = std::accumulate(obs.infected.begin(), obs.infected.begin() + n, 0.0);
    if (!(decided > 0.0) || !(infected > 0.0))
        return 1.0;
    return std::min(1.0, decided / infected);
}

} // namespace

void SearchConfig::validate() const
{
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidParams, msg); };
    if (!(r0_min < r0_max) || r0_min < 0.0)
        fail(fmt::format("r0 range [{}, {}] is invalid", r0_min, r0_max));
    if (r0_steps < 2 || n_steps < 2)
        fail("grid steps must be at least 2");
    if (n_min && !(*n_min >= 1.0 && *n_min < n_max))
        fail(fmt::format("N range [{}, {}] is invalid", *n_min, n_max));
    if (!(n_max > 1.0))
        fail("N max must exceed 1");
    if (refine_rounds < 0)
        fail("refine rounds must be non-negative");
    if (!(refine_shrink > 0.0 && refine_shrink < 1.0))
        fail("refine shrink must be in (0, 1)");
    if (threads < 0)
        fail("threads must be non-negative");
}

int default_thread_count()
{
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0)
        hw = 1;
    if (const char* env = std::getenv("CASCADE_BRANCH_THREADS")) {
        int cap = 0;
        const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), cap);
        if (ec == std::errc{} && cap > 0)
            return std::min(hw, cap);
    }
    return hw;
}

ObservedCurve ObservedCurve::from_series(const GenerationSeries& series)
{
    ObservedCurve c;
    for (const auto& r : series.rows()) {
        c.infected.push_back(static_cast<double>(r.infected));
        c.cumulative.push_back(static_cast<double>(r.cumulative));
        c.decisions.push_back(static_cast<double>(r.decisions));
    }
    return c;
}

ObservedCurve ObservedCurve::from_infected(std::vector<double> infected)
{
    ObservedCurve c;
    c.infected = std::move(infected);
    double running = 0.0;
    for (double v : c.infected) {
        running += v;
        c.cumulative.push_back(running);
    }
    return c;
}

FitResult fit(const ObservedCurve& observed, int k, const SearchConfig& config)
{
    config.validate();
    const int G = observed.generations();
    if (k < 1 || k > G)
        throw Error(ErrorKind::KOutOfRange, fmt::format("k = {} outside 1..{}", k, G));
    if (!(observed.seeds() > 0.0))
        throw Error(ErrorKind::InvalidSeries, "first generation must be non-empty");

    const double n_lo = config.n_min.value_or(std::max(1.0, observed.cumulative[static_cast<std::size_t>(k - 1)]));
    if (!(n_lo < config.n_max))
        throw Error(ErrorKind::InvalidParams,
                    fmt::format("N lower bound {} is not below N max {}", n_lo, config.n_max));
    const int threads = config.threads > 0 ? config.threads : default_thread_count();

    const Axis r0_full{config.r0_min, config.r0_max, config.r0_steps, false};
    const Axis n_full{n_lo, config.n_max, config.n_steps, config.n_log_spaced};
    Candidate best = scan(observed, k, r0_full, n_full, threads);

    double r0_width = config.r0_max - config.r0_min;
    double n_width = config.n_log_spaced ? std::log10(config.n_max) - std::log10(n_lo) : config.n_max - n_lo;
    for (int round = 0; round < config.refine_rounds; ++round) {
        r0_width *= config.refine_shrink;
        n_width *= config.refine_shrink;

        Axis r0_axis{std::max(config.r0_min, best.r0 - r0_width / 2), std::min(config.r0_max, best.r0 + r0_width / 2),
                     config.r0_steps, false};
        Axis n_axis{0.0, 0.0, config.n_steps, config.n_log_spaced};
        if (config.n_log_spaced) {
            const double centre = std::log10(best.n);
            n_axis.lo = std::max(n_lo, std::pow(10.0, centre - n_width / 2));
            n_axis.hi = std::min(config.n_max, std::pow(10.0, centre + n_width / 2));
        } else {
            n_axis.lo = std::max(n_lo, best.n - n_width / 2);
            n_axis.hi = std::min(config.n_max, best.n + n_width / 2);
        }
        const Candidate local = scan(observed, k, r0_axis, n_axis, threads);
        if (better(local, best))
            best = local;
    }

    const double p = decision_rate(observed, k);
    return FitResult{ModelParams(p, best.r0 / p, best.n), best.mse, k};
}

FitResult fit(const GenerationSeries& observed, int k, const SearchConfig& config)
{
    return fit(ObservedCurve::from_series(observed), k, config);
}

FitRow evaluate(const FitResult& result, const ObservedCurve& observed)
{
    const int G = observed.generations();
    const auto traj = project(result.params, observed.seeds(), {std::max(200, G), 0.5});

    FitRow row;
    row.k = result.k_used;
    row.params = result.params;
    row.period_mse = result.period_mse;
    row.campaign_mse = trajectory_mse(traj, observed.cumulative, G);
    row.estimated_reach = predicted_reach(result.params, observed.seeds());
    const double actual = observed.reach();
    row.reach_error = std::abs(row.estimated_reach - actual);
    row.reach_error_pct = actual > 0.0 ? row.reach_error / actual : 0.0;
    return row;
}

FitRow evaluate(const FitResult& result, const GenerationSeries& observed)
{
    return evaluate(result, ObservedCurve::from_series(observed));
}

FitReport sweep(const ObservedCurve& observed, const SearchConfig& config)
{
    FitReport report;
    report.actual_reach = observed.reach();
    for (int k = 1; k <= observed.generations(); ++k)
        report.rows.push_back(evaluate(fit(observed, k, config), observed));
    return report;
}

FitReport sweep(const GenerationSeries& observed, const SearchConfig& config)
{
    return sweep(ObservedCurve::from_series(observed), config);
}

void write_fit_report(std::ostream& out, const FitReport& report)
{
    out << "k,period_mse,campaign_mse,estimated_reach,reach_error,reach_error_pct\n";
    for (const auto& r : report.rows)
        out << fmt::format("{},{},{},{},{},{}\n", r.k, format_decimal(r.period_mse, 2),
                           format_decimal(r.campaign_mse, 2), format_decimal(r.estimated_reach, 2),
                           format_decimal(r.reach_error, 2), format_decimal(r.reach_error_pct * 100.0, 2));
}

void write_reach_error_curve(std::ostream& out, const FitReport& report)
{
    out << "k,reach_error_pct\n";
    for (const auto& r : report.rows)
        out << fmt::format("{},{}\n", r.k, format_decimal(r.reach_error_pct * 100.0, 2));
}

void write_fit_params(std::ostream& out, const FitReport& report)
{
    out << "k,p,lambda,r0,population\n";
    for (const auto& r : report.rows)
        out << fmt::format("{},{:.6f},{:.6f},{:.6f},{:.3f}\n", r.k, r.params.p(), r.params.lambda(), r.params.r0(),
                           r.params.population());
}

} // namespace cascade_branch
