#include <pamsvm/sweep.hpp>

#include <gtest/gtest.h>

#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace pamsvm;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

Scenario small_scenario(std::size_t n = 20000)
{
    Scenario sc;
    sc.n_symbols = n;
    sc.train_length = 3000;
    sc.seeds = {1, 2};
    EqualizerSpec svm{"svm_9x3", EqKind::svm, EqTapConfig::lightweight(), {}, 1e-3};
    EqualizerSpec lms{"ffe_dfe_9x3", EqKind::ffe_dfe, EqTapConfig::lightweight(), {}, 1e-3};
    EqualizerSpec raw{"slicer", EqKind::slicer, {1, 0}, {}, 0.0};
    sc.equalizers = {svm, lms, raw};
    return sc;
}

std::string csv_of(const SweepReport& rep)
{
    std::ostringstream os;
    write_csv(os, rep);
    return os.str();
}

} // namespace

TEST(Sweep, BenignChannelAtInfiniteSnrIsErrorFree)
{
    auto sc = small_scenario();
    sc.channel.f3db_norm = 0.49 * sc.tx.sps;
    const auto rep = sweep_snr(sc, {inf});
    ASSERT_EQ(rep.points.size(), 1u);
    for (const auto& [name, r] : rep.points[0].per_equalizer) {
        EXPECT_EQ(r.bit_errors, 0u) << name;
        EXPECT_EQ(r.ber, 0.0) << name;
    }
}

TEST(Sweep, BerFallsWithSnr)
{
    const auto rep = sweep_snr(small_scenario(), {4.0, 8.0, 12.0});
    for (const auto& eq : small_scenario().equalizers) {
        const auto c = rep.curve(eq.name);
        ASSERT_EQ(c.size(), 3u);
        EXPECT_GT(c[0].ber, c[1].ber) << eq.name;
        EXPECT_GE(c[1].ber, c[2].ber) << eq.name;
    }
}

TEST(Sweep, EqualizersSharePairedStreams)
{
    const auto rep = sweep_snr(small_scenario(), {10.0, 12.0});
    for (const auto& p : rep.points) {
        ASSERT_EQ(p.runs.size(), 6u);
        for (const auto& a : p.runs)
            for (const auto& b : p.runs)
                if (a.seed == b.seed) EXPECT_EQ(a.stream_hash, b.stream_hash);
                else EXPECT_NE(a.stream_hash, b.stream_hash);
    }
    // same seed, different SNR: different streams
    EXPECT_NE(rep.points[0].runs[0].stream_hash, rep.points[1].runs[0].stream_hash);
}

TEST(Sweep, PointTotalsAreSumsOverSeeds)
{
    const auto rep = sweep_snr(small_scenario(), {9.0});
    const auto& p = rep.points[0];
    for (const auto& [name, total] : p.per_equalizer) {
        std::uint64_t bits = 0, errs = 0;
        for (const auto& r : p.runs)
            if (r.equalizer == name) {
                bits += r.result.bits_total;
                errs += r.result.bit_errors;
            }
        EXPECT_EQ(total.bits_total, bits);
        EXPECT_EQ(total.bit_errors, errs);
    }
}

TEST(Sweep, CsvIsByteIdenticalAcrossRunsAndThreadCounts)
{
    const auto sc = small_scenario();
    const std::string a = csv_of(sweep_snr(sc, {8.0, 11.0}, 1));
    const std::string b = csv_of(sweep_snr(sc, {8.0, 11.0}, 1));
    const std::string c = csv_of(sweep_snr(sc, {8.0, 11.0}, 4));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
}

TEST(Sweep, CsvHeaderAndRowOrder)
{
    const auto rep = sweep_snr(small_scenario(), {12.0, inf, 6.0});
    std::istringstream is(csv_of(rep));
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, csv_header);
    std::vector<std::string> rows;
    while (std::getline(is, line)) rows.push_back(line);
    ASSERT_EQ(rows.size(), 3u * 2u * 3u);
    EXPECT_EQ(rows.front().rfind("snr_db,6,1,ffe_dfe_9x3,", 0), 0u) << rows.front();
    EXPECT_EQ(rows[1].rfind("snr_db,6,1,slicer,", 0), 0u) << rows[1];
    EXPECT_EQ(rows[3].rfind("snr_db,6,2,ffe_dfe_9x3,", 0), 0u) << rows[3];
    EXPECT_EQ(rows.back().rfind("snr_db,inf,2,svm_9x3,", 0), 0u) << rows.back();
}

TEST(Sweep, LowErrorPointsAreFlagged)
{
    auto sc = small_scenario();
    sc.channel.f3db_norm = 0.49 * sc.tx.sps;
    const auto rep = sweep_snr(sc, {inf});
    EXPECT_FALSE(rep.warnings.empty());
    for (const auto& [name, r] : rep.points[0].per_equalizer) EXPECT_TRUE(r.low_confidence()) << name;
}

TEST(TrainingSweep, SharesTestSymbolsAcrossLengths)
{
    auto sc = small_scenario();
    const auto rep = sweep_training_length(sc, {500, 1000, 4000});
    ASSERT_EQ(rep.points.size(), 3u);
    EXPECT_EQ(rep.x_kind, "train_length");
    for (const auto& eq : sc.equalizers) {
        const auto& a = rep.points[0].per_equalizer.at(eq.name);
        const auto& b = rep.points[2].per_equalizer.at(eq.name);
        EXPECT_EQ(a.bits_total, b.bits_total);
    }
    // the slicer ignores the training length entirely
    EXPECT_EQ(rep.points[0].per_equalizer.at("slicer").bit_errors,
              rep.points[2].per_equalizer.at("slicer").bit_errors);
}

TEST(TrainingSweep, RejectsImpossibleLengths)
{
    const auto sc = small_scenario();
    EXPECT_THROW(sweep_training_length(sc, {0, 500}), TooShort);
    EXPECT_THROW(sweep_training_length(sc, {500, 20000}), TooShort);
    EXPECT_THROW(sweep_training_length(sc, {1000, 500}), InvalidArgument);
    EXPECT_THROW(sweep_training_length(sc, {}), InvalidArgument);
}

TEST(Evaluate, TooShortTestSegment)
{
    auto sc = small_scenario(1000);
    const auto frame = make_frame(sc.tx, sc.n_symbols);
    const auto rx = run_link(frame, sc.tx, sc.channel);
    EXPECT_THROW(evaluate_equalizer(sc.equalizers[0], rx, frame, 995, 995), TooShort);
    EXPECT_THROW(evaluate_equalizer(sc.equalizers[0], rx, frame, 5, 500), TooShort);
}

TEST(Evaluate, SkipsWarmUpAndTail)
{
    auto sc = small_scenario(5000);
    const auto frame = make_frame(sc.tx, sc.n_symbols);
    const auto rx = run_link(frame, sc.tx, sc.channel);
    const auto svm = evaluate_equalizer(sc.equalizers[0], rx, frame, 2000, 2000);
    EXPECT_EQ(svm.result.skip_prefix, 4u);
    EXPECT_EQ(svm.result.symbols_total, 3000u - 4u - 4u);
    const auto raw = evaluate_equalizer(sc.equalizers[2], rx, frame, 2000, 2000);
    EXPECT_EQ(raw.result.symbols_total, 3000u);
}

TEST(Format, Numbers)
{
    EXPECT_EQ(format_number(inf), "inf");
    EXPECT_EQ(format_number(14.0), "14");
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
}
