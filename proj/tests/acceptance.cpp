#include "cascade_branch/cli.hpp"
#include "cascade_branch/estimator.hpp"
#include "cascade_branch/format.hpp"
#include "cascade_branch/forest.hpp"
#include "cascade_branch/metrics.hpp"
#include "cascade_branch/model.hpp"
#include "cascade_branch/simulator.hpp"
#include "cascade_branch/temporal.hpp"
#include "test_support.hpp"

#include <fmt/format.h>

#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace cascade_branch;
using cascade_branch::testing::fixture;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(const std::string& id, bool ok, const std::string& what, const std::string& detail)
{
    if (!ok)
        ++failures;
    std::cout << fmt::format("{} {:<4} {} ({})\n", ok ? "PASS" : "FAIL", id, what, detail) << std::flush;
}

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Triple {
    const char* p;
    const char* lambda;
    const char* etp;
};

// printed values of the published campaign table
const std::array<Triple, 14> kV1 = {{
    {"1.0000", "11.0000", "11.0000"}, {"0.9091", "4.9000", "4.4545"}, {"0.5306", "4.0769", "2.1633"},
    {"0.3962", "2.9286", "1.1604"},   {"0.3333", "2.1951", "0.7317"}, {"0.3667", "2.3939", "0.8778"},
    {"0.2532", "2.0500", "0.5190"},   {"0.2683", "3.9091", "1.0488"}, {"0.2791", "3.3333", "0.9302"},
    {"0.3500", "2.7143", "0.9500"},   {"0.1842", "1.8571", "0.3421"}, {"0.2308", "1.3333", "0.3077"},
    {"0.2500", "1.0000", "0.2500"},   {"0.0000", "0.0000", "0.0000"},
}};

const std::array<Triple, 12> kV2 = {{
    {"0.8889", "23.3750", "20.7778"}, {"0.2781", "10.6154", "2.9519"}, {"0.2083", "6.8000", "1.4167"},
    {"0.1343", "4.2857", "0.5754"},   {"0.1222", "4.5636", "0.5578"},  {"0.1275", "4.2813", "0.5458"},
    {"0.1314", "2.6111", "0.3431"},   {"0.1064", "5.4000", "0.5745"},  {"0.1481", "12.7500", "1.8889"},
    {"0.0784", "1.5000", "0.1176"},   {"0.5000", "1.3333", "0.6667"},  {"0.5000", "0.0000", "0.0000"},
}};

template <std::size_t N>
int count_matches(const GenerationParams& params, const std::array<Triple, N>& printed, std::string& mismatches)
{
    int ok = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const auto& r = params.rows.at(i);
        const bool match = format_decimal(r.p, 4) == printed[i].p && format_decimal(r.lambda, 4) == printed[i].lambda &&
                           format_decimal(r.etp, 4) == printed[i].etp;
        if (match)
            ++ok;
        else
            mismatches += fmt::format(" g{}", r.generation);
    }
    return ok;
}

void criterion_1()
{
    const auto start = Clock::now();
    std::string mismatches;
    const int ok = count_matches(epidemic_params(cascade_branch::testing::v1_series()), kV1, mismatches) +
                   count_matches(epidemic_params(cascade_branch::testing::v2_series()), kV2, mismatches);
    const double t = seconds_since(start);
    report("1", ok == 26 && t < 1.0, "table 1 triples to 4 decimals",
           fmt::format("{}/26 match{}, {:.3f}s", ok, mismatches.empty() ? "" : ", off:" + mismatches, t));
}

void criterion_2()
{
    auto set_of = [](const GenerationSeries& s) { return campaign_summary(s, epidemic_params(s, 0.0)).super_critical; };
    const auto v1 = set_of(cascade_branch::testing::v1_series());
    const auto v2 = set_of(cascade_branch::testing::v2_series());
    report("2", v1 == std::vector<int>{1, 2, 3, 4, 8} && v2 == std::vector<int>{1, 2, 3, 9},
           "super-critical generations", fmt::format("V1 {{{}}}, V2 {{{}}}", fmt::join(v1, ","), fmt::join(v2, ",")));
}

void criterion_3()
{
    const auto s = cascade_branch::testing::v1_series();
    const auto ratio = campaign_summary(s, epidemic_params(s)).etp_ratios.at(0).value_or(-1.0);
    report("3", std::abs(ratio - 0.4049) <= 1e-4, "V1 etp(2)/etp(1) = 0.4049 +-0.0001", fmt::format("{:.6f}", ratio));
}

void criterion_4()
{
    const auto m = cascade_branch::testing::v1_matrix();
    const double d1 = m.column_fraction(1), d2 = m.column_fraction(2);
    report("4", std::abs(d1 - 0.1956) <= 5e-4 && std::abs(d2 - 0.1565) <= 5e-4, "table 2 day fractions +-0.0005",
           fmt::format("day1 {:.5f}, day2 {:.5f}", d1, d2));
}

void criterion_5()
{
    const auto start = Clock::now();
    std::mt19937_64 rng(20240501);
    std::uniform_real_distribution<double> unit;
    int campaigns = 0, generations = 0, violations = 0;
    for (; campaigns < 150; ++campaigns) {
        SimParams params;
        params.p = unit(rng);
        params.lambda = 6.0 * unit(rng);
        params.population = 10 + static_cast<std::int64_t>(rng() % 5000);
        params.seeds = 1 + static_cast<std::int64_t>(rng() % std::min<std::int64_t>(params.population, 25));
        params.mean_delay = 1.0 + 86400.0 * unit(rng);
        params.rng_seed = rng();
        const auto csv = to_csv(simulate(params), params.describe());
        const auto series = generation_counts(build_forest(parse_events(csv).log));
        for (int g = 1; g <= series.generations(); ++g, ++generations) {
            const std::int64_t next = g < series.generations() ? series.at(g + 1).infected : 0;
            if (series.at(g).sent != next)
                ++violations;
        }
    }
    const double t = seconds_since(start);
    report("5", violations == 0 && t < 10.0, "chain invariant after ingest",
           fmt::format("{} campaigns, {} generations, {} violations, {:.2f}s", campaigns, generations, violations, t));
}

void criterion_6()
{
    const double r0 = 1.2, n = 1000.0;
    const auto truth = project(ModelParams::from_r0(r0, n), 1.0);
    const auto obs = ObservedCurve::from_infected(truth.expected_infected);
    const double true_reach = predicted_reach(ModelParams::from_r0(r0, n), 1.0);
    int bad = 0;
    double worst_time = 0.0, worst_r0 = 0.0, worst_n = 0.0, worst_reach = 0.0;
    std::string failed_k;
    for (int k = 2; k <= obs.generations(); ++k) {
        const auto start = Clock::now();
        const auto fitted = fit(obs, k);
        const double t = seconds_since(start);
        const auto row = evaluate(fitted, obs);
        const double e_r0 = std::abs(fitted.params.r0() - r0) / r0;
        const double e_n = std::abs(fitted.params.population() - n) / n;
        const double e_reach = std::abs(row.estimated_reach - true_reach) / true_reach;
        worst_time = std::max(worst_time, t);
        worst_r0 = std::max(worst_r0, e_r0);
        worst_n = std::max(worst_n, e_n);
        worst_reach = std::max(worst_reach, e_reach);
        if (e_r0 > 0.01 || e_n > 0.05 || e_reach > 0.01 || t >= 5.0) {
            ++bad;
            failed_k += fmt::format(" {}", k);
        }
    }
    report("6", bad == 0, "noise-free recovery for every k >= 2",
           fmt::format("G={}, worst r0 {:.3f}%, N {:.3f}%, reach {:.3f}%, slowest fit {:.2f}s{}", obs.generations(),
                       worst_r0 * 100, worst_n * 100, worst_reach * 100, worst_time,
                       failed_k.empty() ? "" : ", failing k:" + failed_k));
}

void criterion_7()
{
    std::vector<double> mses;
    mses.push_back(fit(cascade_branch::testing::v1_series(), 1).period_mse);
    mses.push_back(fit(cascade_branch::testing::v2_series(), 1).period_mse);
    mses.push_back(fit(ObservedCurve::from_infected({5, 40, 2, 900}), 1).period_mse);
    const bool ok = std::all_of(mses.begin(), mses.end(), [](double v) { return v == 0.0; });
    report("7", ok, "period_mse at k=1 is exactly 0", fmt::format("{}", fmt::join(mses, ", ")));
}

void criterion_8()
{
    const auto start = Clock::now();
    const auto rep = sweep(cascade_branch::testing::v1_series());
    const double t = seconds_since(start);
    auto pct = [&](int k) { return rep.rows.at(static_cast<std::size_t>(k - 1)).reach_error_pct * 100.0; };
    report("8a", pct(5) < pct(3) && pct(12) < pct(5), "V1 reach error ordering k=3 > k=5 > k=12",
           fmt::format("{:.2f}% > {:.2f}% > {:.2f}%, sweep {:.2f}s", pct(3), pct(5), pct(12), t));
    report("8b", pct(5) <= 40.0, "V1 reach error at k=5 <= 40%", fmt::format("{:.2f}%", pct(5)));
    double worst = 0.0;
    for (int k = 11; k <= 14; ++k)
        worst = std::max(worst, pct(k));
    report("8c", worst <= 15.0, "V1 reach error for k >= 11 <= 15%", fmt::format("max {:.2f}%", worst));
}

void criterion_9()
{
    const auto rep = stabilization(cascade_branch::testing::v1_matrix(), 3);
    const auto& e = rep.entries;
    const bool g13_ok = !e.at(12).stable_at || *e.at(12).stable_at >= 6;
    auto show = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("not stable"); };
    report("9", e.at(0).stable_at == 1 && e.at(1).stable_at == 1 && g13_ok, "table 2 stabilization, window 3",
           fmt::format("g1 {}, g2 {}, g13 {}", show(e.at(0).stable_at), show(e.at(1).stable_at), show(e.at(12).stable_at)));
}

void criterion_10()
{
    const auto start = Clock::now();
    SimParams params;
    params.p = 0.5;
    params.lambda = 1.0;
    params.population = 1'000'000;
    params.seeds = 100;
    params.rng_seed = 1;
    const auto table = empirical_vs_expected(params, 10'000);
    const double t = seconds_since(start);
    double worst = 0.0;
    for (int g = 1; g <= 5 && g <= static_cast<int>(table.rows.size()); ++g) {
        const double law = 100.0 * std::pow(0.5, g - 1);
        worst = std::max(worst, std::abs(table.rows[static_cast<std::size_t>(g - 1)].empirical_mean - law) / law);
    }
    const bool ok = table.rows.size() >= 5 && worst <= 0.05 && t < 30.0;
    report("10", ok, "sub-critical mean law over 10000 runs",
           fmt::format("p*lambda=0.5, g<=5 worst deviation {:.3f}%, {:.2f}s", worst * 100, t));
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int cli_quiet(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    return cli::run(args, out, err);
}

void criterion_11()
{
    cascade_branch::testing::TempDir dir("acceptance");
    const std::vector<std::string> sim{"simulate", "--p", "0.3", "--lambda", "4", "--n", "1000", "--rng-seed", "42"};
    auto a = sim, b = sim;
    a.insert(a.end(), {"--out", dir / "a.csv"});
    b.insert(b.end(), {"--out", dir / "b.csv"});
    const bool sim_ok = cli_quiet(a) == 0 && cli_quiet(b) == 0 && !slurp(dir / "a.csv").empty() &&
                        slurp(dir / "a.csv") == slurp(dir / "b.csv");

    const std::vector<std::string> rep{"report", "--events", fixture("v1_events.csv")};
    auto ra = rep, rb = rep;
    ra.insert(ra.end(), {"--out", dir / "ra"});
    rb.insert(rb.end(), {"--out", dir / "rb"});
    const bool rep_ok = cli_quiet(ra) == 0 && cli_quiet(rb) == 0 && !slurp(dir / "ra/manifest.json").empty() &&
                        slurp(dir / "ra/manifest.json") == slurp(dir / "rb/manifest.json");
    report("11", sim_ok && rep_ok, "deterministic simulate output and report manifest",
           fmt::format("simulate {}, manifest {}", sim_ok ? "identical" : "differs", rep_ok ? "identical" : "differs"));
}

} // namespace

int main()
{
    try {
        criterion_1();
        criterion_2();
        criterion_3();
        criterion_4();
        criterion_5();
        criterion_6();
        criterion_7();
        criterion_8();
        criterion_9();
        criterion_10();
        criterion_11();
    } catch (const std::exception& e) {
        std::cout << "FAIL aborted: " << e.what() << '\n';
        return 1;
    }
    std::cout << fmt::format("{} failing check(s)\n", failures);
    return failures == 0 ? 0 : 1;
}
