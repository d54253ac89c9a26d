#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cascade_branch {

/// Seconds since the Unix epoch.
using Timestamp = std::int64_t;

/// One transmission. A record without a sender marks a seed.
struct EventRecord {
    std::optional<std::string> sender;
    std::string recipient;
    Timestamp timestamp = 0;

    bool is_seed() const noexcept { return !sender.has_value(); }
    bool operator==(const EventRecord&) const = default;
};

/// Raw campaign trace, sorted by timestamp (stable: file order breaks ties).
class EventLog {
public:
    EventLog() = default;
    explicit EventLog(std::vector<EventRecord> records);

    const std::vector<EventRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    bool operator==(const EventLog&) const = default;

private:
    std::vector<EventRecord> records_;
};

enum class TimestampFormat { Auto, EpochSeconds, Rfc3339 };

struct FormatConfig {
    char delimiter = ',';
    TimestampFormat timestamps = TimestampFormat::Auto;
};

/// A rejected input line. Line numbers are 1-based and count the header.
struct Diagnostic {
    std::size_t line = 0;
    std::string message;
};

struct ParsedEvents {
    EventLog log;
    std::vector<Diagnostic> diagnostics;
    TimestampFormat detected = TimestampFormat::EpochSeconds;
};

/// Parses `sender_id,recipient_id,timestamp` CSV. Lines starting with '#'
/// and blank lines are skipped. Bad lines become diagnostics; the call
/// throws EmptyInput when nothing valid remains and MixedTimestampFormats
/// when epoch and RFC 3339 values appear in the same file.
ParsedEvents parse_events(std::istream& source, const FormatConfig& format = {});
ParsedEvents parse_events(std::string_view text, const FormatConfig& format = {});
ParsedEvents parse_events_file(const std::string& path, const FormatConfig& format = {});

/// Epoch-seconds CSV with header. `comment`, when non-empty, is emitted as a
/// leading `# ...` line.
void write_events(std::ostream& out, const EventLog& log, std::string_view comment = {});
std::string to_csv(const EventLog& log, std::string_view comment = {});

/// Parses `YYYY-MM-DDTHH:MM:SS[.frac](Z|+HH:MM|-HH:MM)`; fractional seconds
/// are truncated toward the earlier second.
std::optional<Timestamp> parse_rfc3339(std::string_view text);
std::optional<Timestamp> parse_epoch_seconds(std::string_view text);

} // namespace cascade_branch
