#include "cascade_branch/error.hpp"
#include "cascade_branch/events.hpp"
#include "cascade_branch/simulator.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <random>

using namespace cascade_branch;
using cascade_branch::testing::log_of;

namespace {

ErrorKind kind_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorKind::Io;
}

} // namespace

TEST(ParseEvents, EmptySenderIsSeed)
{
    const auto log = log_of(",A,100\n");
    ASSERT_EQ(log.size(), 1u);
    EXPECT_TRUE(log.records()[0].is_seed());
    EXPECT_EQ(log.records()[0].recipient, "A");
    EXPECT_EQ(log.records()[0].timestamp, 100);
}

TEST(ParseEvents, SortsByTimestamp)
{
    const auto log = log_of("A,B,200\n,A,100\n");
    ASSERT_EQ(log.size(), 2u);
    EXPECT_TRUE(log.records()[0].is_seed());
    EXPECT_EQ(log.records()[1].sender, "A");
    EXPECT_EQ(log.records()[1].recipient, "B");
}

TEST(ParseEvents, EqualTimestampsKeepFileOrder)
{
    const auto log = log_of(",A,100\nA,C,150\nA,B,150\nA,D,150\n");
    ASSERT_EQ(log.size(), 4u);
    EXPECT_EQ(log.records()[1].recipient, "C");
    EXPECT_EQ(log.records()[2].recipient, "B");
    EXPECT_EQ(log.records()[3].recipient, "D");
}

TEST(ParseEvents, BadTimestampBecomesDiagnosticWithLineNumber)
{
    // line 1 is the header
    const auto parsed = parse_events("sender_id,recipient_id,timestamp\n,A,100\nA,B,tomorrow\nA,C,300\n");
    EXPECT_EQ(parsed.log.size(), 2u);
    ASSERT_EQ(parsed.diagnostics.size(), 1u);
    EXPECT_EQ(parsed.diagnostics[0].line, 3u);
}

TEST(ParseEvents, WrongFieldCountIsDiagnostic)
{
    const auto parsed = parse_events("sender_id,recipient_id,timestamp\n,A,100\nA,B\n# note\nA,C,1,2\n");
    EXPECT_EQ(parsed.log.size(), 1u);
    ASSERT_EQ(parsed.diagnostics.size(), 2u);
    EXPECT_EQ(parsed.diagnostics[0].line, 3u);
    EXPECT_EQ(parsed.diagnostics[1].line, 5u);
}

TEST(ParseEvents, EmptyInputs)
{
    EXPECT_EQ(kind_of([] { parse_events(""); }), ErrorKind::EmptyInput);
    EXPECT_EQ(kind_of([] { parse_events("sender_id,recipient_id,timestamp\n"); }), ErrorKind::EmptyInput);
    EXPECT_EQ(kind_of([] { parse_events("sender_id,recipient_id,timestamp\nA,B,x\n"); }), ErrorKind::EmptyInput);
}

TEST(ParseEvents, HeaderRequired)
{
    EXPECT_EQ(kind_of([] { parse_events(",A,100\n"); }), ErrorKind::MissingHeader);
}

TEST(ParseEvents, Rfc3339)
{
    const auto log = log_of(",A,2010-01-01T00:00:00Z\nA,B,2010-01-01T01:00:00+01:00\nA,C,2010-01-01T00:00:30.75Z\n");
    ASSERT_EQ(log.size(), 3u);
    EXPECT_EQ(log.records()[0].timestamp, 1262304000);
    EXPECT_EQ(log.records()[1].timestamp, 1262304000);
    EXPECT_EQ(log.records()[2].timestamp, 1262304030);
}

TEST(ParseEvents, MixedTimestampFormatsRejected)
{
    EXPECT_EQ(kind_of([] { log_of(",A,100\nA,B,2010-01-01T00:00:00Z\n"); }), ErrorKind::MixedTimestampFormats);
    EXPECT_EQ(kind_of([] { log_of(",A,2010-01-01T00:00:00Z\nA,B,100\n"); }), ErrorKind::MixedTimestampFormats);
}

TEST(Rfc3339, RejectsInvalidDates)
{
    EXPECT_FALSE(parse_rfc3339("2010-02-30T00:00:00Z"));
    EXPECT_FALSE(parse_rfc3339("2010-01-01T24:00:00Z"));
    EXPECT_FALSE(parse_rfc3339("2010-01-01T00:00:00"));
    EXPECT_FALSE(parse_rfc3339("2010-01-01"));
    EXPECT_EQ(parse_rfc3339("1970-01-01T00:00:00Z"), 0);
    EXPECT_EQ(parse_rfc3339("1969-12-31T23:59:59Z"), -1);
}

// Serialized logs parse back to the same log, for random logs with ties.
TEST(ParseEvents, RoundTripProperty)
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<EventRecord> records;
        const int n = 1 + static_cast<int>(rng() % 40);
        for (int i = 0; i < n; ++i) {
            EventRecord r;
            if (rng() % 4 != 0)
                r.sender = "s" + std::to_string(rng() % 10);
            r.recipient = "r" + std::to_string(rng() % 30);
            r.timestamp = static_cast<Timestamp>(rng() % 20) - 5;
            records.push_back(r);
        }
        const EventLog log(records);
        EXPECT_EQ(parse_events(to_csv(log, "round trip")).log, log);
    }
}

TEST(ParseEvents, SimulatedLogRoundTrips)
{
    SimParams params;
    params.p = 0.6;
    params.lambda = 3.0;
    params.population = 300;
    params.rng_seed = 11;
    const auto log = simulate(params);
    EXPECT_EQ(parse_events(to_csv(log, params.describe())).log, log);
}
