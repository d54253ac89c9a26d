#include "cascade_branch/series.hpp"

#include "cascade_branch/error.hpp"
#include "csv_util.hpp"

#include <fstream>
#include <unordered_set>

#include <fmt/format.h>

namespace cascade_branch {

GenerationSeries::GenerationSeries(std::vector<GenerationRow> rows) : rows_(std::move(rows))
{
    std::int64_t running = 0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        const int g = static_cast<int>(i) + 1;
        if (r.generation != g)
            throw Error(ErrorKind::InvalidSeries, fmt::format("row {} has generation {}", g, r.generation));
        if (r.infected < 0 || r.decisions < 0 || r.sent < 0)
            throw Error(ErrorKind::InvalidSeries, fmt::format("generation {}: negative count", g));
        running += r.infected;
        if (r.cumulative != running)
            throw Error(ErrorKind::InvalidSeries,
                        fmt::format("generation {}: cumulative {} != {}", g, r.cumulative, running));
        if (r.decisions > r.infected)
            throw Error(ErrorKind::InvalidSeries, fmt::format("generation {}: decisions exceed infected", g));
        const std::int64_t next = i + 1 < rows_.size() ? rows_[i + 1].infected : 0;
        if (r.sent != next)
            throw Error(ErrorKind::InvalidSeries,
                        fmt::format("generation {}: sent {} != next generation's infected {}", g, r.sent, next));
    }
}

const GenerationRow& GenerationSeries::at(int generation) const
{
    if (generation < 1 || generation > generations())
        throw Error(ErrorKind::UnknownGeneration, fmt::format("generation {} not in 1..{}", generation, generations()));
    return rows_[static_cast<std::size_t>(generation - 1)];
}

GenerationSeries generation_counts(const CascadeForest& forest)
{
    if (forest.empty())
        throw Error(ErrorKind::EmptyInput, "forest has no nodes");

    const auto G = static_cast<std::size_t>(forest.max_generation());
    std::vector<GenerationRow> rows(G);
    std::unordered_set<std::string> deciders;
    for (const auto& node : forest.nodes()) {
        auto& row = rows[static_cast<std::size_t>(node.generation - 1)];
        ++row.infected;
        if (node.infector) {
            auto& parent_row = rows[static_cast<std::size_t>(node.generation - 2)];
            ++parent_row.sent;
            if (deciders.insert(*node.infector).second)
                ++parent_row.decisions;
        }
    }
    std::int64_t running = 0;
    for (std::size_t i = 0; i < G; ++i) {
        rows[i].generation = static_cast<int>(i) + 1;
        running += rows[i].infected;
        rows[i].cumulative = running;
    }
    return GenerationSeries(std::move(rows));
}

void write_series(std::ostream& out, const GenerationSeries& series)
{
    out << "generation,infected,cumulative,decisions,sent\n";
    for (const auto& r : series.rows())
        out << fmt::format("{},{},{},{},{}\n", r.generation, r.infected, r.cumulative, r.decisions, r.sent);
}

GenerationSeries read_series(std::istream& in)
{
    detail::CsvTable table = detail::read_csv(in);
    detail::require_header(table, {"generation", "infected", "cumulative", "decisions", "sent"});
    std::vector<GenerationRow> rows;
    for (const auto& line : table.rows) {
        GenerationRow r;
        r.generation = static_cast<int>(detail::to_int(line, 0));
        r.infected = detail::to_int(line, 1);
        r.cumulative = detail::to_int(line, 2);
        r.decisions = detail::to_int(line, 3);
        r.sent = detail::to_int(line, 4);
        rows.push_back(r);
    }
    if (rows.empty())
        throw Error(ErrorKind::EmptyInput, "series has no rows");
    return GenerationSeries(std::move(rows));
}

GenerationSeries read_series_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open " + path);
    return read_series(in);
}

} // namespace cascade_branch
