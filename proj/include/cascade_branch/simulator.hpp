#pragma once

#include "cascade_branch/events.hpp"
#include "cascade_branch/series.hpp"
#include "cascade_branch/temporal.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cascade_branch {

/// Generator behind every stochastic routine here. Runs reproduce only
/// within one standard library implementation.
inline constexpr std::string_view kRngAlgorithm = "std::mt19937_64/v1";

struct SimParams {
    double p = 0.5;
    double lambda = 2.0;
    std::int64_t population = 1000;
    std::int64_t seeds = 1;
    double mean_delay = 3600.0; ///< seconds
    int max_generations = 1000;
    std::uint64_t rng_seed = 0;
    Timestamp start_time = 0;

    /// Throws InvalidParams.
    void validate() const;
    /// One-line `key=value` description, used as the event file header comment.
    std::string describe() const;
};

struct SimulationResult {
    EventLog log;
    /// Ground truth from the generator, indexed by generation - 1.
    std::vector<std::int64_t> infected_per_generation;
    std::vector<Timestamp> first_infection;
};

/// Bernoulli(p) forwarding decision, Poisson(lambda) contact attempts per
/// decider, uniform targets over the whole population, integer delays of at
/// least one second drawn from an exponential with mean `mean_delay`.
/// Events are processed in time order, so the generator's infection tree is
/// the one build_forest reconstructs.
SimulationResult simulate_detailed(const SimParams& params);
EventLog simulate(const SimParams& params);

struct ComparisonRow {
    int generation = 0;
    double empirical_mean = 0.0;
    double expected = 0.0;
    double relative_deviation = 0.0; ///< (empirical - expected) / expected; 0 when both vanish
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    double empirical_mean_reach = 0.0;
    double expected_reach = 0.0; ///< predicted_reach at the default horizon and eps
    int runs = 0;
};

/// Averages `runs` simulations (rng seeds rng_seed, rng_seed + 1, ...) and
/// lines them up with the deterministic projection for the same parameters.
ComparisonTable empirical_vs_expected(const SimParams& params, int runs);

void write_comparison(std::ostream& out, const ComparisonTable& table);

struct ReconstructOptions {
    std::uint64_t rng_seed = 0;
    Timestamp start_time = 0;
    /// Used when no period matrix constrains the timing.
    double mean_delay = 1800.0;
    /// Periods over which infections beyond the matrix's coverage are spread.
    int campaign_periods = 31;
};

/// Builds an event log whose generation counts equal `series` exactly and,
/// when `matrix` is given, whose first matrix.periods() periods reproduce its
/// per-generation counts. Throws InvalidSeries when the constraints cannot be
/// satisfied causally.
EventLog reconstruct_campaign(const GenerationSeries& series, const std::optional<PeriodMatrix>& matrix,
                              const ReconstructOptions& options = {});

} // namespace cascade_branch
