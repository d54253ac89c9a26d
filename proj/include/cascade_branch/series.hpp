#pragma once

#include "cascade_branch/forest.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cascade_branch {

struct GenerationRow {
    int generation = 0;
    std::int64_t infected = 0;
    std::int64_t cumulative = 0;
    std::int64_t decisions = 0; ///< nodes with at least one successful transmission
    std::int64_t sent = 0;      ///< successful transmissions from this generation

    bool operator==(const GenerationRow&) const = default;
};

/// Per-generation counts for g = 1..G.
class GenerationSeries {
public:
    GenerationSeries() = default;
    /// Validates every invariant (cumulative sums, sent(g) = infected(g+1),
    /// decisions <= infected); throws InvalidSeries otherwise.
    explicit GenerationSeries(std::vector<GenerationRow> rows);

    const std::vector<GenerationRow>& rows() const noexcept { return rows_; }
    const GenerationRow& at(int generation) const;
    int generations() const noexcept { return static_cast<int>(rows_.size()); }
    std::int64_t reach() const noexcept { return rows_.empty() ? 0 : rows_.back().cumulative; }
    std::int64_t seeds() const noexcept { return rows_.empty() ? 0 : rows_.front().infected; }

    bool operator==(const GenerationSeries&) const = default;

private:
    std::vector<GenerationRow> rows_;
};

GenerationSeries generation_counts(const CascadeForest& forest);

/// `generation,infected,cumulative,decisions,sent`
void write_series(std::ostream& out, const GenerationSeries& series);
GenerationSeries read_series(std::istream& in);
GenerationSeries read_series_file(const std::string& path);

} // namespace cascade_branch
