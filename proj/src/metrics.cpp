#include "cascade_branch/metrics.hpp"

#include "cascade_branch/error.hpp"
#include "cascade_branch/format.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace cascade_branch {

std::string_view to_string(Criticality c)
{
    switch (c) {
    case Criticality::Sub: return "sub";
    case Criticality::Critical: return "critical";
    case Criticality::Super: return "super";
    }
    return "?";
}

const GenerationParamsRow& GenerationParams::at(int generation) const
{
    if (generation < 1 || generation > static_cast<int>(rows.size()))
        throw Error(ErrorKind::UnknownGeneration, fmt::format("generation {}", generation));
    return rows[static_cast<std::size_t>(generation - 1)];
}

Criticality classify_criticality(double etp, double tol)
{
    if (std::abs(etp - 1.0) <= tol)
        return Criticality::Critical;
    if (etp > 1.0 + tol)
        return Criticality::Super;
    return Criticality::Sub;
}

GenerationParams epidemic_params(const GenerationSeries& series, double tol)
{
    GenerationParams out;
    out.tolerance = tol;
    out.rows.reserve(series.rows().size());
    for (const auto& r : series.rows()) {
        GenerationParamsRow row;
        row.generation = r.generation;
        if (r.infected > 0)
            row.p = static_cast<double>(r.decisions) / static_cast<double>(r.infected);
        if (r.decisions > 0)
            row.lambda = static_cast<double>(r.sent) / static_cast<double>(r.decisions);
        row.etp = row.p * row.lambda;
        row.criticality = classify_criticality(row.etp, tol);
        out.rows.push_back(row);
    }
    return out;
}

CampaignSummary campaign_summary(const GenerationSeries& series, const GenerationParams& params)
{
    if (params.rows.size() != series.rows().size())
        throw Error(ErrorKind::InvalidSeries, "series and params disagree on generation count");

    CampaignSummary s;
    s.reach = series.reach();
    s.generations = series.generations();
    for (const auto& row : params.rows) {
        if (row.criticality == Criticality::Super)
            s.super_critical.push_back(row.generation);
        else if (row.criticality == Criticality::Critical)
            s.critical.push_back(row.generation);
    }
    for (std::size_t i = 0; i + 1 < params.rows.size(); ++i) {
        const double prev = params.rows[i].etp;
        s.etp_ratios.push_back(prev > 0.0 ? std::optional(params.rows[i + 1].etp / prev) : std::nullopt);
    }
    return s;
}

void write_metrics_report(std::ostream& out, const GenerationSeries& series, const GenerationParams& params)
{
    out << "generation,infected,cumulative,decisions,sent,p,lambda,etp,criticality\n";
    for (std::size_t i = 0; i < series.rows().size(); ++i) {
        const auto& r = series.rows()[i];
        const auto& q = params.rows.at(i);
        out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.generation, r.infected, r.cumulative, r.decisions, r.sent,
                           format_decimal(q.p, 4), format_decimal(q.lambda, 4), format_decimal(q.etp, 4),
                           to_string(q.criticality));
    }
}

} // namespace cascade_branch
