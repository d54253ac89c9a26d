#pragma once

#include "cascade_branch/model.hpp"
#include "cascade_branch/series.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace cascade_branch {

struct SearchConfig {
    double r0_min = 0.0;
    double r0_max = 30.0;
    int r0_steps = 301;
    /// Defaults to the observed cumulative at generation k.
    std::optional<double> n_min;
    double n_max = 1e6;
    int n_steps = 200;
    bool n_log_spaced = true;
    int refine_rounds = 5;
    double refine_shrink = 0.2;
    /// 0 picks CASCADE_BRANCH_THREADS or the hardware concurrency.
    int threads = 0;

    /// Throws InvalidParams on min >= max, steps < 2 or shrink outside (0,1).
    void validate() const;
};

/// Number of worker threads honoring CASCADE_BRANCH_THREADS.
int default_thread_count();

/// Observed per-generation counts as reals, so model output can be fed back in.
struct ObservedCurve {
    std::vector<double> infected;
    std::vector<double> cumulative;
    /// Empty when decisions are unknown; p is then reported as 1.
    std::vector<double> decisions;

    static ObservedCurve from_series(const GenerationSeries& series);
    static ObservedCurve from_infected(std::vector<double> infected);

    int generations() const noexcept { return static_cast<int>(infected.size()); }
    double seeds() const { return infected.at(0); }
    double reach() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

struct FitResult {
    ModelParams params;
    double period_mse = 0.0;
    int k_used = 1;
};

struct FitRow {
    int k = 0;
    double period_mse = 0.0;
    double campaign_mse = 0.0;
    double estimated_reach = 0.0;
    double reach_error = 0.0;
    double reach_error_pct = 0.0; ///< fraction of the actual reach, not x100
    ModelParams params = ModelParams(0.0, 0.0, 1.0);
};

struct FitReport {
    double actual_reach = 0.0;
    std::vector<FitRow> rows;
};

/// Best (r0, N) over generations 1..k: a full grid pass, then refine_rounds
/// of local grids shrunk around the incumbent. Ties go to the smaller r0,
/// then the smaller N. Throws KOutOfRange unless 1 <= k <= G.
FitResult fit(const ObservedCurve& observed, int k, const SearchConfig& config = {});
FitResult fit(const GenerationSeries& observed, int k, const SearchConfig& config = {});

FitRow evaluate(const FitResult& result, const ObservedCurve& observed);
FitRow evaluate(const FitResult& result, const GenerationSeries& observed);

/// One row per k = 1..G; the k = G row is the reference model.
FitReport sweep(const ObservedCurve& observed, const SearchConfig& config = {});
FitReport sweep(const GenerationSeries& observed, const SearchConfig& config = {});

/// `k,period_mse,campaign_mse,estimated_reach,reach_error,reach_error_pct`,
/// two decimals, the percentage printed x100.
void write_fit_report(std::ostream& out, const FitReport& report);
/// `k,reach_error_pct`
void write_reach_error_curve(std::ostream& out, const FitReport& report);
/// `k,p,lambda,r0,population`
void write_fit_params(std::ostream& out, const FitReport& report);

} // namespace cascade_branch
