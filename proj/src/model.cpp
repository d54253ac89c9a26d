#include "cascade_branch/model.hpp"

#include "cascade_branch/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace cascade_branch {

ModelParams::ModelParams(double p, double lambda, double population)
    : p_(p), lambda_(lambda), population_(population)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw Error(ErrorKind::InvalidParams, fmt::format("p = {} outside [0, 1]", p));
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw Error(ErrorKind::InvalidParams, fmt::format("lambda = {} must be finite and >= 0", lambda));
    if (!(population >= 1.0) || !std::isfinite(population))
        throw Error(ErrorKind::InvalidParams, fmt::format("N = {} must be finite and >= 1", population));
}

ModelParams ModelParams::from_r0(double r0, double population)
{
    return ModelParams(1.0, r0, population);
}

double Trajectory::cumulative_at(int generation) const
{
    if (expected_cumulative.empty() || generation < 1)
        return 0.0;
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(generation - 1), expected_cumulative.size() - 1);
    return expected_cumulative[idx];
}

Trajectory project(const ModelParams& params, double seeds, ProjectionLimits limits)
{
    if (!(seeds > 0.0))
        throw Error(ErrorKind::InvalidParams, "seeds must be positive");
    if (limits.horizon < 1 || limits.horizon > 10'000)
        throw Error(ErrorKind::InvalidParams, fmt::format("horizon {} outside 1..10000", limits.horizon));
    if (!(limits.eps > 0.0))
        throw Error(ErrorKind::InvalidParams, "eps must be positive");

    const double r0 = params.r0();
    const double n = params.population();
    const double ceiling = n + seeds;

    Trajectory t;
    t.expected_infected.reserve(static_cast<std::size_t>(std::min(limits.horizon, 256)));
    double current = seeds;
    double cumulative = seeds;
    t.expected_infected.push_back(current);
    t.expected_cumulative.push_back(cumulative);

    while (t.length() < limits.horizon) {
        const double depletion = std::max(0.0, 1.0 - cumulative / n);
        const double next = std::min(current * r0 * depletion, std::max(0.0, ceiling - cumulative));
        if (next < limits.eps) {
            t.extinct_at = t.length();
            break;
        }
        current = next;
        cumulative += next;
        t.expected_infected.push_back(current);
        t.expected_cumulative.push_back(cumulative);
    }
    return t;
}

double predicted_reach(const ModelParams& params, double seeds, ProjectionLimits limits)
{
    return project(params, seeds, limits).final_cumulative();
}

double trajectory_mse(const Trajectory& traj, std::span<const double> observed_cumulative, int upto)
{
    if (upto <= 0)
        throw Error(ErrorKind::UptoZero, "upto must be at least 1");
    if (static_cast<std::size_t>(upto) > observed_cumulative.size())
        throw Error(ErrorKind::KOutOfRange,
                    fmt::format("upto {} exceeds {} observed generations", upto, observed_cumulative.size()));
    double sum = 0.0;
    for (int g = 1; g <= upto; ++g) {
        const double d = traj.cumulative_at(g) - observed_cumulative[static_cast<std::size_t>(g - 1)];
        sum += d * d;
    }
    return sum / upto;
}

double trajectory_mse(const Trajectory& traj, const GenerationSeries& observed, int upto)
{
    std::vector<double> cumulative;
    cumulative.reserve(observed.rows().size());
    for (const auto& r : observed.rows())
        cumulative.push_back(static_cast<double>(r.cumulative));
    return trajectory_mse(traj, cumulative, upto);
}

void write_trajectory(std::ostream& out, const Trajectory& traj)
{
    out << "generation,expected_infected,expected_cumulative\n";
    for (int g = 1; g <= traj.length(); ++g) {
        const auto i = static_cast<std::size_t>(g - 1);
        out << fmt::format("{},{:.6f},{:.6f}\n", g, traj.expected_infected[i], traj.expected_cumulative[i]);
    }
}

} // namespace cascade_branch
