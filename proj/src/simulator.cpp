#include "cascade_branch/simulator.hpp"

#include "cascade_branch/error.hpp"
#include "cascade_branch/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <unordered_map>

#include <fmt/format.h>

namespace cascade_branch {

namespace {

struct Attempt {
    Timestamp time;
    std::uint64_t seq; // FIFO among equal times
    std::int64_t sender;
    std::int64_t target;
    int sender_generation;

    bool operator>(const Attempt& o) const { return time != o.time ? time > o.time : seq > o.seq; }
};

std::string member_id(std::int64_t index)
{
    return fmt::format("u{}", index);
}

// Runs one campaign. `on_event(sender, target, time)` sees every record in
// time order; sender is -1 for seeds.
template <typename OnEvent>
void run_campaign(const SimParams& params, std::vector<std::int64_t>& per_generation,
                  std::vector<Timestamp>& first_infection, OnEvent&& on_event)
{
    std::mt19937_64 rng(params.rng_seed);
    std::bernoulli_distribution decides(params.p);
    std::poisson_distribution<int> attempts(params.lambda > 0.0 ? params.lambda : 1.0);
    std::uniform_int_distribution<std::int64_t> target(0, params.population - 1);
    std::exponential_distribution<double> delay(params.mean_delay > 0.0 ? 1.0 / params.mean_delay : 1.0);

    std::unordered_map<std::int64_t, int> infected;
    std::priority_queue<Attempt, std::vector<Attempt>, std::greater<>> pending;
    std::uint64_t seq = 0;

    auto infect = [&](std::int64_t who, int generation, Timestamp at) {
        infected.emplace(who, generation);
        if (per_generation.size() < static_cast<std::size_t>(generation)) {
            per_generation.resize(static_cast<std::size_t>(generation), 0);
            first_infection.resize(static_cast<std::size_t>(generation), at);
        }
        ++per_generation[static_cast<std::size_t>(generation - 1)];
        auto& first = first_infection[static_cast<std::size_t>(generation - 1)];
        first = std::min(first, at);

        if (generation >= params.max_generations || params.lambda <= 0.0 || !decides(rng))
            return;
        const int k = attempts(rng);
        for (int i = 0; i < k; ++i) {
            const auto to = target(rng);
            const auto wait = std::max<Timestamp>(1, static_cast<Timestamp>(std::ceil(delay(rng))));
            pending.push({at + wait, seq++, who, to, generation});
        }
    };

    for (std::int64_t s = 0; s < params.seeds; ++s) {
        on_event(std::int64_t{-1}, s, params.start_time);
        infect(s, 1, params.start_time);
    }
    while (!pending.empty()) {
        const Attempt a = pending.top();
        pending.pop();
        on_event(a.sender, a.target, a.time);
        if (!infected.contains(a.target))
            infect(a.target, a.sender_generation + 1, a.time);
    }
}

} // namespace

void SimParams::validate() const
{
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidParams, msg); };
    if (!(p >= 0.0 && p <= 1.0))
        fail(fmt::format("p = {} outside [0, 1]", p));
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        fail(fmt::format("lambda = {} must be finite and >= 0", lambda));
    if (population < 1)
        fail("population must be positive");
    if (seeds < 1 || seeds > population)
        fail(fmt::format("seeds = {} must be in 1..{}", seeds, population));
    if (!(mean_delay > 0.0) || !std::isfinite(mean_delay))
        fail("mean delay must be positive");
    if (max_generations < 1)
        fail("max generations must be at least 1");
}

std::string SimParams::describe() const
{
    return fmt::format("p={} lambda={} n={} seeds={} mean_delay={} max_generations={} rng_seed={} start_time={} rng={}",
                       p, lambda, population, seeds, mean_delay, max_generations, rng_seed, start_time, kRngAlgorithm);
}

SimulationResult simulate_detailed(const SimParams& params)
{
    params.validate();
    SimulationResult result;
    std::vector<EventRecord> records;
    run_campaign(params, result.infected_per_generation, result.first_infection,
                 [&](std::int64_t sender, std::int64_t target, Timestamp at) {
                     EventRecord r;
                     if (sender >= 0)
                         r.sender = member_id(sender);
                     r.recipient = member_id(target);
                     r.timestamp = at;
                     records.push_back(std::move(r));
                 });
    result.log = EventLog(std::move(records));
    return result;
}

EventLog simulate(const SimParams& params)
{
    return simulate_detailed(params).log;
}

ComparisonTable empirical_vs_expected(const SimParams& params, int runs)
{
    params.validate();
    if (runs < 1)
        throw Error(ErrorKind::InvalidParams, "runs must be at least 1");

    std::vector<double> sums;
    double reach_sum = 0.0;
    for (int r = 0; r < runs; ++r) {
        SimParams run = params;
        run.rng_seed = params.rng_seed + static_cast<std::uint64_t>(r);
        std::vector<std::int64_t> counts;
        std::vector<Timestamp> first;
        run_campaign(run, counts, first, [](std::int64_t, std::int64_t, Timestamp) {});
        if (sums.size() < counts.size())
            sums.resize(counts.size(), 0.0);
        for (std::size_t g = 0; g < counts.size(); ++g)
            sums[g] += static_cast<double>(counts[g]);
        reach_sum += static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}));
    }

    const ModelParams model(params.p, params.lambda, static_cast<double>(params.population));
    const auto seeds = static_cast<double>(params.seeds);
    const int horizon = std::clamp(static_cast<int>(sums.size()), 1, 10'000);
    const auto expected = project(model, seeds, {horizon, 1e-12});

    ComparisonTable table;
    table.runs = runs;
    table.empirical_mean_reach = reach_sum / runs;
    table.expected_reach = predicted_reach(model, seeds);
    for (std::size_t g = 0; g < sums.size(); ++g) {
        ComparisonRow row;
        row.generation = static_cast<int>(g) + 1;
        row.empirical_mean = sums[g] / runs;
        row.expected = g < expected.expected_infected.size() ? expected.expected_infected[g] : 0.0;
        if (row.expected > 0.0)
            row.relative_deviation = (row.empirical_mean - row.expected) / row.expected;
        else
            row.relative_deviation = row.empirical_mean > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        table.rows.push_back(row);
    }
    return table;
}

void write_comparison(std::ostream& out, const ComparisonTable& table)
{
    out << "generation,empirical_mean,expected,relative_deviation\n";
    for (const auto& r : table.rows)
        out << fmt::format("{},{:.6f},{:.6f},{:.6f}\n", r.generation, r.empirical_mean, r.expected,
                           r.relative_deviation);
}

namespace {

struct ReconNode {
    std::string id;
    Timestamp time = 0;
    std::size_t parent = 0; // index into the previous generation
};

} // namespace

EventLog reconstruct_campaign(const GenerationSeries& series, const std::optional<PeriodMatrix>& matrix,
                              const ReconstructOptions& options)
{
    const int G = series.generations();
    if (G == 0)
        throw Error(ErrorKind::InvalidSeries, "series is empty");
    std::mt19937_64 rng(options.rng_seed);
    std::vector<std::vector<ReconNode>> gens(static_cast<std::size_t>(G));
    for (int g = 1; g <= G; ++g) {
        auto& nodes = gens[static_cast<std::size_t>(g - 1)];
        nodes.resize(static_cast<std::size_t>(series.at(g).infected));
        for (std::size_t i = 0; i < nodes.size(); ++i)
            nodes[i].id = fmt::format("g{}n{}", g, i + 1);
    }

    const bool timed = matrix.has_value();
    if (timed) {
        // Each period is cut into G + 1 slots; generation g lands in slot g
        // so same-period parents always precede their children.
        const std::int64_t len = matrix->period_len();
        const std::int64_t slot = len / (G + 1);
        if (slot < 2)
            throw Error(ErrorKind::InvalidParams, "period too short for the number of generations");
        const int T = matrix->periods();
        if (options.campaign_periods < T)
            throw Error(ErrorKind::InvalidParams, "campaign_periods is shorter than the matrix");
        std::uniform_int_distribution<std::int64_t> jitter(0, slot * 4 / 5);
        std::uniform_int_distribution<int> late(T + 1, std::max(T + 1, options.campaign_periods));

        for (int g = 1; g <= G; ++g) {
            std::vector<int> periods;
            std::int64_t covered = 0;
            if (g <= matrix->generations()) {
                for (int t = 1; t <= T; ++t)
                    for (std::int64_t c = 0; c < matrix->at(g, t); ++c)
                        periods.push_back(t);
                covered = matrix->row_sum(g);
            }
            const std::int64_t infected = series.at(g).infected;
            if (covered > infected)
                throw Error(ErrorKind::InvalidSeries,
                            fmt::format("generation {}: matrix holds {} infections, series {}", g, covered, infected));
            if (infected > covered && options.campaign_periods <= T)
                throw Error(ErrorKind::InvalidSeries,
                            fmt::format("generation {}: {} infections fall outside the matrix", g, infected - covered));
            for (std::int64_t extra = covered; extra < infected; ++extra)
                periods.push_back(late(rng));
            std::sort(periods.begin(), periods.end());

            auto& nodes = gens[static_cast<std::size_t>(g - 1)];
            for (std::size_t i = 0; i < nodes.size(); ++i)
                nodes[i].time = options.start_time + static_cast<Timestamp>(periods[i] - 1) * len +
                                static_cast<Timestamp>(g - 1) * slot + jitter(rng);
            std::stable_sort(nodes.begin(), nodes.end(),
                             [](const ReconNode& a, const ReconNode& b) { return a.time < b.time; });
        }
        // the first seed opens the campaign
        gens[0][0].time = options.start_time;
    }

    // Parent assignment: the earliest `decisions` nodes of each generation
    // decide; each gets one child, the rest go to random eligible deciders.
    for (int g = 1; g < G; ++g) {
        auto& parents = gens[static_cast<std::size_t>(g - 1)];
        auto& children = gens[static_cast<std::size_t>(g)];
        const auto deciders = static_cast<std::size_t>(series.at(g).decisions);

        // A decider without a child can only appear in transcribed tables
        // (decisions > 0, sent = 0); it is given a repeat attempt below.
        const std::size_t with_child = std::min(deciders, children.size());
        std::vector<bool> assigned(children.size(), false);
        std::size_t next_latest = children.size();
        for (std::size_t d = with_child; d-- > 0;) {
            if (next_latest == 0)
                throw Error(ErrorKind::InvalidSeries, fmt::format("generation {}: too few children", g));
            --next_latest;
            if (timed && children[next_latest].time <= parents[d].time)
                throw Error(ErrorKind::InvalidSeries,
                            fmt::format("generation {}: decider {} has no later child", g, parents[d].id));
            children[next_latest].parent = d;
            assigned[next_latest] = true;
        }
        for (std::size_t c = 0; c < children.size(); ++c) {
            if (assigned[c])
                continue;
            std::size_t eligible = with_child;
            if (timed) {
                eligible = 0;
                while (eligible < with_child && parents[eligible].time < children[c].time)
                    ++eligible;
            }
            if (eligible == 0)
                throw Error(ErrorKind::InvalidSeries,
                            fmt::format("generation {}: child {} precedes every decider", g + 1, children[c].id));
            children[c].parent = std::uniform_int_distribution<std::size_t>(0, eligible - 1)(rng);
        }
    }

    if (!timed) {
        std::exponential_distribution<double> delay(1.0 / options.mean_delay);
        for (auto& seed : gens[0])
            seed.time = options.start_time;
        for (int g = 2; g <= G; ++g)
            for (auto& node : gens[static_cast<std::size_t>(g - 1)])
                node.time = gens[static_cast<std::size_t>(g - 2)][node.parent].time +
                            std::max<Timestamp>(1, static_cast<Timestamp>(std::ceil(delay(rng))));
    }

    std::vector<EventRecord> records;
    for (int g = 1; g <= G; ++g) {
        const auto& nodes = gens[static_cast<std::size_t>(g - 1)];
        const auto deciders = std::min(static_cast<std::size_t>(series.at(g).decisions), nodes.size());
        const std::size_t with_child = g < G ? std::min(deciders, gens[static_cast<std::size_t>(g)].size()) : 0;
        for (std::size_t d = with_child; d < deciders; ++d)
            records.push_back({nodes[d].id, gens[0][0].id, nodes[d].time + 1});
    }
    for (const auto& seed : gens[0])
        records.push_back({std::nullopt, seed.id, seed.time});
    for (int g = 2; g <= G; ++g)
        for (const auto& node : gens[static_cast<std::size_t>(g - 1)])
            records.push_back({gens[static_cast<std::size_t>(g - 2)][node.parent].id, node.id, node.time});
    return EventLog(std::move(records));
}

} // namespace cascade_branch
