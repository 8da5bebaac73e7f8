#include <pamsvm/metrics.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace pamsvm;

namespace {

SymbolFrame amps(std::vector<double> a)
{
    std::vector<std::uint8_t> l;
    for (double v : a) l.push_back(amplitude_to_level(v));
    return frame_from_levels(l);
}

} // namespace

TEST(CountErrors, IdenticalFramesHaveNoErrors)
{
    const auto f = amps({-3, -1, 1, 3, 3, -3});
    const auto r = count_errors(f, f, 0);
    EXPECT_EQ(r.bit_errors, 0u);
    EXPECT_EQ(r.symbol_errors, 0u);
    EXPECT_EQ(r.ber, 0.0);
    EXPECT_EQ(r.ser, 0.0);
    EXPECT_EQ(r.bits_total, 12u);
    EXPECT_TRUE(r.low_confidence());
}

TEST(CountErrors, AdjacentLevelCostsOneBit)
{
    const auto r = count_errors(amps({-3, -1, 1, 1}), amps({-3, -1, 1, 3}), 0);
    EXPECT_EQ(r.symbol_errors, 1u);
    EXPECT_EQ(r.bit_errors, 1u);
    EXPECT_DOUBLE_EQ(r.ser, 0.25);
    EXPECT_DOUBLE_EQ(r.ber, 0.125);
}

TEST(CountErrors, MirroredFrame)
{
    // -3<->+3 flips the MSB only (00 vs 10); -1<->+1 flips the MSB (01 vs 11).
    const auto r = count_errors(amps({3, 1, -1, -3}), amps({-3, -1, 1, 3}), 0);
    EXPECT_DOUBLE_EQ(r.ser, 1.0);
    EXPECT_EQ(r.bit_errors, 4u);
    EXPECT_DOUBLE_EQ(r.ber, 0.5);
}

TEST(CountErrors, SkipPrefixExcludesLeadingSymbols)
{
    const auto r = count_errors(amps({3, 3, -3, -1}), amps({-3, -3, -3, -1}), 2);
    EXPECT_EQ(r.symbol_errors, 0u);
    EXPECT_EQ(r.symbols_total, 2u);
    EXPECT_EQ(r.skip_prefix, 2u);
}

TEST(CountErrors, BitErrorsBoundedBySymbolErrors)
{
    std::mt19937 rng(8);
    std::uniform_int_distribution<int> lvl(0, 3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::uint8_t> a(64), b(64);
        for (auto& v : a) v = static_cast<std::uint8_t>(lvl(rng));
        for (auto& v : b) v = static_cast<std::uint8_t>(lvl(rng));
        const auto r = count_errors(a, b, 0);
        ASSERT_LE(r.bit_errors, 2 * r.symbol_errors);
        ASSERT_GE(r.bit_errors, r.symbol_errors);
    }
}

TEST(CountErrors, Errors)
{
    EXPECT_THROW(count_errors(amps({1, 1}), amps({1, 1, 1}), 0), AlignmentError);
    EXPECT_THROW(count_errors(amps({1, 1}), amps({1, 1}), 2), InvalidArgument);
}

TEST(BerResult, AccumulatesAcrossRuns)
{
    BerResult a = count_errors(amps({-3, 1}), amps({-3, -1}), 0);
    a += count_errors(amps({3, 3}), amps({-3, 3}), 0);
    EXPECT_EQ(a.symbol_errors, 2u);
    EXPECT_EQ(a.bit_errors, 2u);
    EXPECT_EQ(a.bits_total, 8u);
    EXPECT_DOUBLE_EQ(a.ber, 0.25);
    EXPECT_DOUBLE_EQ(a.ser, 0.5);
}

TEST(ThresholdCrossing, InterpolatesInLogDomain)
{
    const std::vector<CurvePoint> c{{0.0, 1e-2}, {2.0, 1e-4}};
    EXPECT_DOUBLE_EQ(*threshold_crossing(c, 1e-3), 1.0);
    const std::vector<CurvePoint> c2{{10.0, 1e-1}, {11.0, 1e-2}, {12.0, 1e-4}};
    EXPECT_NEAR(*threshold_crossing(c2, 1e-3), 11.5, 1e-12);
    EXPECT_NEAR(*threshold_crossing(c2, 3e-2), 10.0 + (std::log10(3e-2) + 1.0) / -1.0, 1e-12);
}

TEST(ThresholdCrossing, EdgeCases)
{
    const std::vector<CurvePoint> flat{{0.0, 1e-2}, {1.0, 1e-2}, {2.0, 1e-2}};
    EXPECT_FALSE(threshold_crossing(flat, 1e-3).has_value());
    const std::vector<CurvePoint> first_below{{5.0, 1e-5}, {6.0, 1e-6}};
    EXPECT_EQ(*threshold_crossing(first_below, 1e-3), 5.0);
    const std::vector<CurvePoint> zero{{0.0, 1e-1}, {1.0, 0.0}};
    EXPECT_EQ(*threshold_crossing(zero, 1e-3), 1.0);
    const std::vector<CurvePoint> unsorted{{1.0, 1e-1}, {0.0, 1e-4}};
    EXPECT_THROW(threshold_crossing(unsorted, 1e-3), InvalidArgument);
    EXPECT_FALSE(threshold_crossing(std::vector<CurvePoint>{}, 1e-3).has_value());
}
