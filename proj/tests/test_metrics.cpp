#include "cascade_branch/format.hpp"
#include "cascade_branch/metrics.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace cascade_branch;
using cascade_branch::testing::v1_series;
using cascade_branch::testing::v2_series;

TEST(EpidemicParams, V1SecondGeneration)
{
    const auto params = epidemic_params(v1_series());
    const auto& g2 = params.at(2);
    EXPECT_EQ(format_decimal(g2.p, 4), "0.9091");
    EXPECT_EQ(format_decimal(g2.lambda, 4), "4.9000");
    EXPECT_EQ(format_decimal(g2.etp, 4), "4.4545");
}

TEST(EpidemicParams, V2FirstGeneration)
{
    const auto params = epidemic_params(v2_series());
    const auto& g1 = params.at(1);
    EXPECT_EQ(format_decimal(g1.p, 4), "0.8889");
    EXPECT_EQ(format_decimal(g1.lambda, 4), "23.3750");
    EXPECT_EQ(format_decimal(g1.etp, 4), "20.7778");
}

TEST(EpidemicParams, ExtinctionRowIsZero)
{
    const GenerationSeries s({{1, 5, 5, 0, 0}});
    const auto params = epidemic_params(s);
    const auto& row = params.at(1);
    EXPECT_EQ(row.p, 0.0);
    EXPECT_EQ(row.lambda, 0.0);
    EXPECT_EQ(row.etp, 0.0);
    EXPECT_EQ(row.criticality, Criticality::Sub);
}

TEST(EpidemicParams, StoredValuesAreFullPrecision)
{
    const auto params = epidemic_params(v1_series());
    const auto& g2 = params.at(2);
    EXPECT_DOUBLE_EQ(g2.p, 10.0 / 11.0);
    EXPECT_DOUBLE_EQ(g2.etp, 49.0 / 11.0);
}

TEST(ClassifyCriticality, Examples)
{
    EXPECT_EQ(classify_criticality(1.0488, 0.0), Criticality::Super);
    EXPECT_EQ(classify_criticality(1.0, 0.0), Criticality::Critical);
    EXPECT_EQ(classify_criticality(0.9302, 0.0), Criticality::Sub);
    EXPECT_EQ(classify_criticality(1.04, 0.05), Criticality::Critical);
    EXPECT_EQ(classify_criticality(0.96, 0.05), Criticality::Critical);
    EXPECT_EQ(classify_criticality(1.06, 0.05), Criticality::Super);
    EXPECT_EQ(classify_criticality(0.0, 0.0), Criticality::Sub);
}

TEST(CampaignSummary, V1)
{
    const auto s = v1_series();
    const auto summary = campaign_summary(s, epidemic_params(s));
    EXPECT_EQ(summary.reach, 639);
    EXPECT_EQ(summary.generations, 14);
    EXPECT_EQ(summary.super_critical, (std::vector<int>{1, 2, 3, 4, 8}));
    ASSERT_TRUE(summary.etp_ratios[0]);
    EXPECT_NEAR(*summary.etp_ratios[0], 0.4049, 1e-4);
}

TEST(CampaignSummary, V2)
{
    const auto s = v2_series();
    const auto summary = campaign_summary(s, epidemic_params(s));
    EXPECT_EQ(summary.reach, 2503);
    EXPECT_EQ(summary.generations, 12);
    EXPECT_EQ(summary.super_critical, (std::vector<int>{1, 2, 3, 9}));
}

TEST(CampaignSummary, SingleSeed)
{
    const GenerationSeries s({{1, 1, 1, 0, 0}});
    const auto summary = campaign_summary(s, epidemic_params(s));
    EXPECT_EQ(summary.reach, 1);
    EXPECT_EQ(summary.generations, 1);
    EXPECT_TRUE(summary.super_critical.empty());
    EXPECT_TRUE(summary.etp_ratios.empty());
}

TEST(MetricsReport, FormatAndRounding)
{
    std::ostringstream out;
    const auto s = v2_series();
    write_metrics_report(out, s, epidemic_params(s));
    const auto text = out.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "generation,infected,cumulative,decisions,sent,p,lambda,etp,criticality");
    // 137/32 = 4.28125 exactly; printed the way the source table prints it
    EXPECT_NE(text.find("6,251,2231,32,137,0.1275,4.2813,0.5458,sub\n"), std::string::npos);
    EXPECT_NE(text.find("12,4,2503,2,0,0.5000,0.0000,0.0000,sub\n"), std::string::npos);
}

TEST(FormatDecimal, TiesAwayFromZero)
{
    EXPECT_EQ(format_decimal(4.28125, 4), "4.2813");
    EXPECT_EQ(format_decimal(0.125, 2), "0.13");
    EXPECT_EQ(format_decimal(-0.001, 2), "0.00");
    EXPECT_EQ(format_decimal(2.0, 0), "2");
}

// etp = p * lambda, and p * lambda * infected = sent whenever someone decided.
TEST(MetricsProperties, AlgebraicIdentities)
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<GenerationRow> rows;
        const int G = 1 + static_cast<int>(rng() % 12);
        std::vector<std::int64_t> infected(static_cast<std::size_t>(G));
        for (auto& v : infected)
            v = 1 + static_cast<std::int64_t>(rng() % 500);
        std::int64_t cumulative = 0;
        for (int g = 0; g < G; ++g) {
            const auto inf = infected[static_cast<std::size_t>(g)];
            cumulative += inf;
            const std::int64_t sent = g + 1 < G ? infected[static_cast<std::size_t>(g + 1)] : 0;
            const std::int64_t dec = sent == 0 ? 0 : 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(std::min(inf, sent)));
            rows.push_back({g + 1, inf, cumulative, dec, sent});
        }
        const GenerationSeries series(rows);
        for (double tol : {0.0, 0.1}) {
            const auto params = epidemic_params(series, tol);
            for (const auto& r : params.rows) {
                const auto& obs = series.at(r.generation);
                EXPECT_NEAR(r.etp, r.p * r.lambda, 1e-9);
                EXPECT_GE(r.p, 0.0);
                EXPECT_LE(r.p, 1.0);
                if (obs.decisions > 0)
                    EXPECT_NEAR(r.p * r.lambda * static_cast<double>(obs.infected), static_cast<double>(obs.sent),
                                1e-9 * static_cast<double>(obs.sent + 1));
                EXPECT_EQ(r.criticality, classify_criticality(r.etp, tol));
            }
        }
    }
}
