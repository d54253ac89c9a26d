#include "cascade_branch/temporal.hpp"

#include "cascade_branch/error.hpp"
#include "cascade_branch/format.hpp"
#include "csv_util.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <fstream>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

namespace cascade_branch {

PeriodMatrix::PeriodMatrix(std::vector<std::vector<std::int64_t>> counts, std::int64_t period_len, Timestamp origin,
                           std::optional<std::int64_t> reach)
    : counts_(std::move(counts)), period_len_(period_len), origin_(origin)
{
    if (period_len_ <= 0)
        throw Error(ErrorKind::InvalidParams, "period length must be positive");
    for (const auto& row : counts_) {
        if (row.size() != counts_.front().size())
            throw Error(ErrorKind::InvalidSeries, "period matrix rows differ in length");
        if (std::any_of(row.begin(), row.end(), [](std::int64_t v) { return v < 0; }))
            throw Error(ErrorKind::InvalidSeries, "negative count in period matrix");
    }
    reach_ = reach.value_or(total());
    if (reach_ < total())
        throw Error(ErrorKind::InvalidSeries, "reach is smaller than the matrix total");
}

const std::vector<std::int64_t>& PeriodMatrix::row(int generation) const
{
    if (generation < 1 || generation > generations())
        throw Error(ErrorKind::UnknownGeneration, fmt::format("generation {} not in 1..{}", generation, generations()));
    return counts_[static_cast<std::size_t>(generation - 1)];
}

std::int64_t PeriodMatrix::at(int generation, int period) const
{
    const auto& r = row(generation);
    if (period < 1 || period > periods())
        throw Error(ErrorKind::InvalidParams, fmt::format("period {} not in 1..{}", period, periods()));
    return r[static_cast<std::size_t>(period - 1)];
}

std::int64_t PeriodMatrix::row_sum(int generation) const
{
    const auto& r = row(generation);
    return std::accumulate(r.begin(), r.end(), std::int64_t{0});
}

std::int64_t PeriodMatrix::column_sum(int period) const
{
    std::int64_t s = 0;
    for (int g = 1; g <= generations(); ++g)
        s += at(g, period);
    return s;
}

std::int64_t PeriodMatrix::total() const
{
    std::int64_t s = 0;
    for (const auto& r : counts_)
        s += std::accumulate(r.begin(), r.end(), std::int64_t{0});
    return s;
}

double PeriodMatrix::column_fraction(int period) const
{
    return reach_ > 0 ? static_cast<double>(column_sum(period)) / static_cast<double>(reach_) : 0.0;
}

PeriodMatrix period_generation_matrix(const CascadeForest& forest, std::int64_t period_len)
{
    if (period_len <= 0)
        throw Error(ErrorKind::InvalidParams, "period length must be positive");
    if (forest.empty())
        throw Error(ErrorKind::EmptyInput, "forest has no nodes");

    const Timestamp origin = forest.origin();
    std::int64_t last_period = 1;
    for (const auto& n : forest.nodes())
        last_period = std::max(last_period, (n.infected_at - origin) / period_len + 1);

    std::vector<std::vector<std::int64_t>> counts(static_cast<std::size_t>(forest.max_generation()),
                                                  std::vector<std::int64_t>(static_cast<std::size_t>(last_period), 0));
    for (const auto& n : forest.nodes()) {
        const auto t = (n.infected_at - origin) / period_len;
        ++counts[static_cast<std::size_t>(n.generation - 1)][static_cast<std::size_t>(t)];
    }
    return PeriodMatrix(std::move(counts), period_len, origin);
}

std::vector<std::vector<std::int64_t>> cumulative_by_generation(const PeriodMatrix& matrix,
                                                                const std::vector<int>& generations)
{
    std::vector<std::vector<std::int64_t>> curves;
    curves.reserve(generations.size());
    for (int g : generations) {
        const auto& r = matrix.row(g);
        std::vector<std::int64_t> curve(r.size());
        std::partial_sum(r.begin(), r.end(), curve.begin());
        curves.push_back(std::move(curve));
    }
    return curves;
}

std::vector<std::int64_t> first_occurrence(const CascadeForest& forest)
{
    if (forest.empty())
        throw Error(ErrorKind::EmptyInput, "forest has no nodes");
    const Timestamp origin = forest.origin();
    std::vector<std::int64_t> first(static_cast<std::size_t>(forest.max_generation()),
                                    std::numeric_limits<std::int64_t>::max());
    for (const auto& n : forest.nodes()) {
        auto& slot = first[static_cast<std::size_t>(n.generation - 1)];
        slot = std::min(slot, n.infected_at - origin);
    }
    return first;
}

StabilizationReport stabilization(const PeriodMatrix& matrix, int window)
{
    if (window < 1)
        throw Error(ErrorKind::InvalidParams, "window must be at least 1");
    StabilizationReport report;
    report.window = window;
    const int T = matrix.periods();
    for (int g = 1; g <= matrix.generations(); ++g) {
        const auto& r = matrix.row(g);
        int last_active = 0;
        for (int t = T; t >= 1; --t) {
            if (r[static_cast<std::size_t>(t - 1)] != 0) {
                last_active = t;
                break;
            }
        }
        StabilizationEntry e{g, std::nullopt};
        if (T - last_active >= window)
            e.stable_at = last_active;
        report.entries.push_back(e);
    }
    return report;
}

std::int64_t parse_period(const std::string& text)
{
    if (text.empty())
        throw Error(ErrorKind::InvalidParams, "empty period");
    std::int64_t multiplier = 1;
    std::string digits = text;
    switch (text.back()) {
    case 's': multiplier = 1; digits.pop_back(); break;
    case 'm': multiplier = 60; digits.pop_back(); break;
    case 'h': multiplier = 3600; digits.pop_back(); break;
    case 'd': multiplier = 86400; digits.pop_back(); break;
    case 'w': multiplier = 7 * 86400; digits.pop_back(); break;
    default: break;
    }
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() || value <= 0)
        throw Error(ErrorKind::InvalidParams, fmt::format("cannot parse period '{}'", text));
    return value * multiplier;
}

void write_period_matrix(std::ostream& out, const PeriodMatrix& matrix)
{
    out << fmt::format("# reach={}\n# period_len={}\n# origin={}\n", matrix.reach(), matrix.period_len(),
                       matrix.origin());
    out << "generation";
    for (int t = 1; t <= matrix.periods(); ++t)
        out << ",p" << t;
    out << '\n';
    for (int g = 1; g <= matrix.generations(); ++g)
        out << g << ',' << fmt::format("{}", fmt::join(matrix.row(g), ",")) << '\n';
    out << "pct";
    for (int t = 1; t <= matrix.periods(); ++t)
        out << ',' << format_decimal(matrix.column_fraction(t) * 100.0, 2);
    out << '\n';
}

PeriodMatrix read_period_matrix(std::istream& in)
{
    const auto table = detail::read_csv(in);
    if (table.header.empty() || table.header.front() != "generation")
        throw Error(ErrorKind::MissingHeader, "expected header 'generation,p1,...'");
    const auto T = table.header.size() - 1;
    for (std::size_t t = 1; t <= T; ++t)
        if (table.header[t] != fmt::format("p{}", t))
            throw Error(ErrorKind::MissingHeader, fmt::format("column {} should be 'p{}'", t + 1, t));

    std::vector<std::vector<std::int64_t>> counts;
    for (const auto& line : table.rows) {
        if (!line.fields.empty() && line.fields.front() == "pct")
            continue;
        if (line.fields.size() != T + 1)
            throw Error(ErrorKind::MalformedLine, fmt::format("line {}: expected {} fields", line.line_no, T + 1));
        const auto g = detail::to_int(line, 0);
        if (g != static_cast<std::int64_t>(counts.size()) + 1)
            throw Error(ErrorKind::MalformedLine, fmt::format("line {}: generations must be 1,2,...", line.line_no));
        std::vector<std::int64_t> row;
        for (std::size_t t = 1; t <= T; ++t)
            row.push_back(detail::to_int(line, t));
        counts.push_back(std::move(row));
    }
    if (counts.empty())
        throw Error(ErrorKind::EmptyInput, "period matrix has no rows");

    auto meta_int = [&](const char* key) -> std::optional<std::int64_t> {
        const auto it = table.meta.find(key);
        if (it == table.meta.end())
            return std::nullopt;
        std::int64_t v = 0;
        const auto& s = it->second;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size())
            throw Error(ErrorKind::MalformedLine, fmt::format("bad '{}' value '{}'", key, s));
        return v;
    };
    return PeriodMatrix(std::move(counts), meta_int("period_len").value_or(86400), meta_int("origin").value_or(0),
                        meta_int("reach"));
}

PeriodMatrix read_period_matrix_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open " + path);
    return read_period_matrix(in);
}

void write_cumulative_curves(std::ostream& out, const std::vector<int>& generations,
                             const std::vector<std::vector<std::int64_t>>& curves)
{
    out << "period";
    for (int g : generations)
        out << ",g" << g;
    out << '\n';
    const std::size_t T = curves.empty() ? 0 : curves.front().size();
    for (std::size_t t = 0; t < T; ++t) {
        out << t + 1;
        for (const auto& c : curves)
            out << ',' << c[t];
        out << '\n';
    }
}

void write_first_occurrence(std::ostream& out, const std::vector<std::int64_t>& offsets)
{
    out << "generation,first_seconds,first_minutes\n";
    for (std::size_t i = 0; i < offsets.size(); ++i)
        out << fmt::format("{},{},{:.2f}\n", i + 1, offsets[i], static_cast<double>(offsets[i]) / 60.0);
}

void write_stabilization(std::ostream& out, const StabilizationReport& report)
{
    out << "generation,stable_at,window\n";
    for (const auto& e : report.entries)
        out << e.generation << ',' << (e.stable_at ? std::to_string(*e.stable_at) : std::string()) << ','
            << report.window << '\n';
}

} // namespace cascade_branch
