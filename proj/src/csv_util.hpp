#pragma once

// Small helpers for the numeric report formats. Event logs have their own
// parser in events.cpp because they need per-line diagnostics.

#include "cascade_branch/error.hpp"

#include <charconv>
#include <cstdint>
#include <initializer_list>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace cascade_branch::detail {

struct CsvLine {
    std::size_t line_no = 0;
    std::vector<std::string> fields;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<CsvLine> rows;
    std::map<std::string, std::string> meta; ///< from `# key=value` comment lines
};

inline std::string trim_copy(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(trim_copy(line.substr(start)));
            return out;
        }
        out.push_back(trim_copy(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

inline CsvTable read_csv(std::istream& in)
{
    CsvTable table;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim_copy(raw);
        if (line.empty())
            continue;
        if (line.front() == '#') {
            const auto body = trim_copy(line.substr(1));
            const auto eq = body.find('=');
            if (eq != std::string::npos)
                table.meta[trim_copy(body.substr(0, eq))] = trim_copy(body.substr(eq + 1));
            continue;
        }
        auto fields = split_fields(line);
        if (table.header.empty())
            table.header = std::move(fields);
        else
            table.rows.push_back({line_no, std::move(fields)});
    }
    if (table.header.empty())
        throw Error(ErrorKind::EmptyInput, "no header line");
    return table;
}

inline void require_header(const CsvTable& table, std::initializer_list<const char*> expected)
{
    std::vector<std::string> want(expected.begin(), expected.end());
    if (table.header != want)
        throw Error(ErrorKind::MissingHeader, fmt::format("expected header '{}'", fmt::join(want, ",")));
}

inline std::int64_t to_int(const CsvLine& line, std::size_t column)
{
    if (column >= line.fields.size())
        throw Error(ErrorKind::MalformedLine, fmt::format("line {}: missing column {}", line.line_no, column + 1));
    const auto& f = line.fields[column];
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
    if (ec != std::errc{} || ptr != f.data() + f.size())
        throw Error(ErrorKind::MalformedLine, fmt::format("line {}: '{}' is not an integer", line.line_no, f));
    return value;
}

} // namespace cascade_branch::detail
