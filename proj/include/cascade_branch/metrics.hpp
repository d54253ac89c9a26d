#pragma once

#include "cascade_branch/series.hpp"

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace cascade_branch {

enum class Criticality { Sub, Critical, Super };

std::string_view to_string(Criticality c);

struct GenerationParamsRow {
    int generation = 0;
    double p = 0.0;      ///< decisions / infected
    double lambda = 0.0; ///< sent / decisions, 0 when nobody decided
    double etp = 0.0;    ///< p * lambda
    Criticality criticality = Criticality::Sub;
};

struct GenerationParams {
    std::vector<GenerationParamsRow> rows;
    double tolerance = 0.0;

    const GenerationParamsRow& at(int generation) const;
};

/// Critical iff |etp - 1| <= tol, Super iff etp > 1 + tol, Sub otherwise.
Criticality classify_criticality(double etp, double tol = 0.0);

GenerationParams epidemic_params(const GenerationSeries& series, double tol = 0.0);

struct CampaignSummary {
    std::int64_t reach = 0;
    int generations = 0;
    std::vector<int> super_critical;
    std::vector<int> critical;
    /// etp(g+1) / etp(g) for g = 1..G-1; empty when etp(g) is zero.
    std::vector<std::optional<double>> etp_ratios;
};

CampaignSummary campaign_summary(const GenerationSeries& series, const GenerationParams& params);

/// `generation,infected,cumulative,decisions,sent,p,lambda,etp,criticality`,
/// p, lambda and etp at four decimals.
void write_metrics_report(std::ostream& out, const GenerationSeries& series, const GenerationParams& params);

} // namespace cascade_branch
