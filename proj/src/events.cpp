#include "cascade_branch/events.hpp"

#include "cascade_branch/error.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace cascade_branch {

namespace {

std::string_view trim(std::string_view s)
{
    constexpr std::string_view ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line, char delim)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

bool parse_fixed(std::string_view s, std::size_t pos, std::size_t len, int& out)
{
    if (pos + len > s.size())
        return false;
    const char* b = s.data() + pos;
    const char* e = b + len;
    if (!std::all_of(b, e, [](char c) { return c >= '0' && c <= '9'; }))
        return false;
    return std::from_chars(b, e, out).ec == std::errc{};
}

bool looks_like_epoch(std::string_view s)
{
    if (!s.empty() && (s.front() == '-' || s.front() == '+'))
        s.remove_prefix(1);
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

} // namespace

EventLog::EventLog(std::vector<EventRecord> records) : records_(std::move(records))
{
    std::stable_sort(records_.begin(), records_.end(),
                     [](const EventRecord& a, const EventRecord& b) { return a.timestamp < b.timestamp; });
}

std::optional<Timestamp> parse_epoch_seconds(std::string_view text)
{
    if (!looks_like_epoch(text))
        return std::nullopt;
    if (text.front() == '+')
        text.remove_prefix(1);
    Timestamp value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        return std::nullopt;
    return value;
}

std::optional<Timestamp> parse_rfc3339(std::string_view s)
{
    // 2006-01-02T15:04:05
    int year, month, day, hour, minute, second;
    if (s.size() < 20)
        return std::nullopt;
    if (!parse_fixed(s, 0, 4, year) || s[4] != '-' || !parse_fixed(s, 5, 2, month) || s[7] != '-' ||
        !parse_fixed(s, 8, 2, day) || (s[10] != 'T' && s[10] != 't' && s[10] != ' ') ||
        !parse_fixed(s, 11, 2, hour) || s[13] != ':' || !parse_fixed(s, 14, 2, minute) || s[16] != ':' ||
        !parse_fixed(s, 17, 2, second))
        return std::nullopt;

    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        const auto digits_begin = pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9')
            ++pos;
        if (pos == digits_begin)
            return std::nullopt;
    }
    if (pos >= s.size())
        return std::nullopt;

    int offset_seconds = 0;
    const char zone = s[pos];
    if (zone == 'Z' || zone == 'z') {
        ++pos;
    } else if (zone == '+' || zone == '-') {
        int oh, om;
        if (!parse_fixed(s, pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
            !parse_fixed(s, pos + 4, 2, om) || oh > 23 || om > 59)
            return std::nullopt;
        offset_seconds = (oh * 3600 + om * 60) * (zone == '+' ? 1 : -1);
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != s.size())
        return std::nullopt;
    if (hour > 23 || minute > 59 || second > 60)
        return std::nullopt;

    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                             std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok())
        return std::nullopt;
    const auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
    return static_cast<Timestamp>(days_since_epoch) * 86400 + hour * 3600 + minute * 60 + second -
           offset_seconds;
}

ParsedEvents parse_events(std::istream& source, const FormatConfig& format)
{
    ParsedEvents result;
    std::vector<EventRecord> records;
    std::optional<TimestampFormat> detected;
    if (format.timestamps != TimestampFormat::Auto)
        detected = format.timestamps;

    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    bool any_content = false;
    while (std::getline(source, line)) {
        ++line_no;
        const auto view = trim(line);
        if (view.empty() || view.front() == '#')
            continue;
        any_content = true;
        const auto fields = split(view, format.delimiter);

        if (!header_seen) {
            if (fields.size() != 3 || fields[0] != "sender_id" || fields[1] != "recipient_id" ||
                fields[2] != "timestamp")
                throw Error(ErrorKind::MissingHeader,
                            fmt::format("line {}: expected header 'sender_id,recipient_id,timestamp'", line_no));
            header_seen = true;
            continue;
        }

        if (fields.size() != 3) {
            result.diagnostics.push_back({line_no, fmt::format("expected 3 fields, found {}", fields.size())});
            continue;
        }
        if (fields[1].empty()) {
            result.diagnostics.push_back({line_no, "empty recipient_id"});
            continue;
        }

        const bool epoch_shape = looks_like_epoch(fields[2]);
        if (!detected)
            detected = epoch_shape ? TimestampFormat::EpochSeconds : TimestampFormat::Rfc3339;

        std::optional<Timestamp> ts;
        if (*detected == TimestampFormat::EpochSeconds) {
            ts = parse_epoch_seconds(fields[2]);
            if (!ts && format.timestamps == TimestampFormat::Auto && parse_rfc3339(fields[2]))
                throw Error(ErrorKind::MixedTimestampFormats,
                            fmt::format("line {}: RFC 3339 timestamp in an epoch-seconds file", line_no));
        } else {
            ts = parse_rfc3339(fields[2]);
            if (!ts && format.timestamps == TimestampFormat::Auto && epoch_shape)
                throw Error(ErrorKind::MixedTimestampFormats,
                            fmt::format("line {}: epoch timestamp in an RFC 3339 file", line_no));
        }
        if (!ts) {
            result.diagnostics.push_back({line_no, fmt::format("unparsable timestamp '{}'", fields[2])});
            continue;
        }

        EventRecord rec;
        if (!fields[0].empty())
            rec.sender = std::string(fields[0]);
        rec.recipient = std::string(fields[1]);
        rec.timestamp = *ts;
        records.push_back(std::move(rec));
    }

    if (!any_content)
        throw Error(ErrorKind::EmptyInput, "no data");
    if (records.empty())
        throw Error(ErrorKind::EmptyInput,
                    fmt::format("no valid event records ({} malformed lines)", result.diagnostics.size()));

    result.detected = detected.value_or(TimestampFormat::EpochSeconds);
    result.log = EventLog(std::move(records));
    return result;
}

ParsedEvents parse_events(std::string_view text, const FormatConfig& format)
{
    std::istringstream in{std::string(text)};
    return parse_events(in, format);
}

ParsedEvents parse_events_file(const std::string& path, const FormatConfig& format)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open " + path);
    return parse_events(in, format);
}

void write_events(std::ostream& out, const EventLog& log, std::string_view comment)
{
    if (!comment.empty())
        out << "# " << comment << '\n';
    out << "sender_id,recipient_id,timestamp\n";
    for (const auto& r : log.records())
        out << r.sender.value_or("") << ',' << r.recipient << ',' << r.timestamp << '\n';
}

std::string to_csv(const EventLog& log, std::string_view comment)
{
    std::ostringstream out;
    write_events(out, log, comment);
    return out.str();
}

} // namespace cascade_branch
