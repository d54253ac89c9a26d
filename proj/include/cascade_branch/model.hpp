#pragma once

#include "cascade_branch/series.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace cascade_branch {

/// Global branching-model parameters. The mean recursion only sees r0 = p * lambda.
class ModelParams {
public:
    /// Throws InvalidParams unless p in [0,1], lambda >= 0 and population >= 1.
    ModelParams(double p, double lambda, double population);

    /// p = 1, lambda = r0.
    static ModelParams from_r0(double r0, double population);

    double p() const noexcept { return p_; }
    double lambda() const noexcept { return lambda_; }
    double population() const noexcept { return population_; }
    double r0() const noexcept { return p_ * lambda_; }

private:
    double p_;
    double lambda_;
    double population_;
};

struct Trajectory {
    std::vector<double> expected_infected;
    std::vector<double> expected_cumulative;
    /// Last generation before the next expected count fell below eps.
    std::optional<int> extinct_at;

    int length() const noexcept { return static_cast<int>(expected_infected.size()); }
    double final_cumulative() const noexcept
    {
        return expected_cumulative.empty() ? 0.0 : expected_cumulative.back();
    }
    /// Cumulative at generation g (1-based); held at its final value past the end.
    double cumulative_at(int generation) const;
};

struct ProjectionLimits {
    int horizon = 200;
    double eps = 0.5;
};

/// I(1) = seeds, I(g+1) = I(g) * r0 * max(0, 1 - C(g)/N), C(g) = sum of I(j) for j <= g.
/// New infections are additionally capped by the N + seeds - C(g) members
/// left, so the cumulative never exceeds N + seeds.
Trajectory project(const ModelParams& params, double seeds, ProjectionLimits limits = {});

/// Expected cumulative at termination (horizon 200, eps 0.5 by default).
double predicted_reach(const ModelParams& params, double seeds, ProjectionLimits limits = {});

/// Mean over g = 1..upto of (model cumulative - observed cumulative)^2.
/// Throws UptoZero for upto == 0 and KOutOfRange when upto exceeds the observation.
double trajectory_mse(const Trajectory& traj, std::span<const double> observed_cumulative, int upto);
double trajectory_mse(const Trajectory& traj, const GenerationSeries& observed, int upto);

/// `generation,expected_infected,expected_cumulative`
void write_trajectory(std::ostream& out, const Trajectory& traj);

} // namespace cascade_branch
