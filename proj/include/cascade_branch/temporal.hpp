#pragma once

#include "cascade_branch/forest.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cascade_branch {

/// New infections per generation (rows) and period (columns).
class PeriodMatrix {
public:
    PeriodMatrix() = default;
    /// `counts[g-1][t-1]`; every row must have the same length. `reach`
    /// defaults to the matrix total and may exceed it when the matrix only
    /// covers a prefix of the campaign.
    PeriodMatrix(std::vector<std::vector<std::int64_t>> counts, std::int64_t period_len, Timestamp origin,
                 std::optional<std::int64_t> reach = std::nullopt);

    int generations() const noexcept { return static_cast<int>(counts_.size()); }
    int periods() const noexcept { return counts_.empty() ? 0 : static_cast<int>(counts_.front().size()); }
    std::int64_t period_len() const noexcept { return period_len_; }
    Timestamp origin() const noexcept { return origin_; }
    std::int64_t reach() const noexcept { return reach_; }

    /// 1-based generation and period.
    std::int64_t at(int generation, int period) const;
    const std::vector<std::int64_t>& row(int generation) const;
    std::int64_t row_sum(int generation) const;
    std::int64_t column_sum(int period) const;
    std::int64_t total() const;
    /// column_sum(period) / reach()
    double column_fraction(int period) const;

    const std::vector<std::vector<std::int64_t>>& counts() const noexcept { return counts_; }

private:
    std::vector<std::vector<std::int64_t>> counts_;
    std::int64_t period_len_ = 86400;
    Timestamp origin_ = 0;
    std::int64_t reach_ = 0;
};

/// Period t = floor((infected_at - origin) / period_len) + 1, origin = first infection.
PeriodMatrix period_generation_matrix(const CascadeForest& forest, std::int64_t period_len);

/// Running sums of the requested rows. Throws UnknownGeneration.
std::vector<std::vector<std::int64_t>> cumulative_by_generation(const PeriodMatrix& matrix,
                                                                const std::vector<int>& generations);

/// Seconds from the first infection to the first node of each generation.
std::vector<std::int64_t> first_occurrence(const CascadeForest& forest);

struct StabilizationEntry {
    int generation = 0;
    /// Absent while the generation is still active within the last `window` periods.
    std::optional<int> stable_at;
};

struct StabilizationReport {
    int window = 3;
    std::vector<StabilizationEntry> entries;
};

/// stable_at(g) is the last period with a generation-g infection (0 for an
/// empty row), reported only when at least `window` quiet periods follow it
/// before the data ends.
StabilizationReport stabilization(const PeriodMatrix& matrix, int window = 3);

/// Parses durations like `86400`, `90s`, `30m`, `1h`, `1d`. Throws InvalidParams.
std::int64_t parse_period(const std::string& text);

/// `generation,p1,...,pT` rows followed by `pct,...` column fractions (two
/// decimals, as percentages). A leading `# reach=...` line records the reach.
void write_period_matrix(std::ostream& out, const PeriodMatrix& matrix);
PeriodMatrix read_period_matrix(std::istream& in);
PeriodMatrix read_period_matrix_file(const std::string& path);

/// `period,g1,g2,...` one column per requested generation.
void write_cumulative_curves(std::ostream& out, const std::vector<int>& generations,
                             const std::vector<std::vector<std::int64_t>>& curves);
/// `generation,first_seconds,first_minutes`
void write_first_occurrence(std::ostream& out, const std::vector<std::int64_t>& offsets);
/// `generation,stable_at,window`; stable_at empty when not yet stable.
void write_stabilization(std::ostream& out, const StabilizationReport& report);

} // namespace cascade_branch
