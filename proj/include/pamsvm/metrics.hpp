#ifndef PAMSVM_METRICS_HPP
#define PAMSVM_METRICS_HPP

#include <pamsvm/error.hpp>
#include <pamsvm/txgen.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pamsvm {

struct FecThresholds {
    static constexpr double hd_fec = 1e-2;     // conventional hard-decision FEC limit
    static constexpr double target = 1e-3;     // low-threshold FEC operating point
    static constexpr double svm_floor = 3e-4;  // error floor observed with SOA preamp
};

/// Points with fewer counted bit errors than this are flagged low-confidence.
inline constexpr std::uint64_t min_reliable_errors = 10;

struct BerResult {
    std::uint64_t bit_errors{0};
    std::uint64_t symbol_errors{0};
    std::uint64_t bits_total{0};
    std::uint64_t symbols_total{0};
    double ber{0.0};
    double ser{0.0};
    std::size_t skip_prefix{0};

    bool low_confidence() const noexcept { return bit_errors < min_reliable_errors; }

    void recompute() noexcept
    {
        ber = bits_total ? static_cast<double>(bit_errors) / static_cast<double>(bits_total) : 0.0;
        ser = symbols_total ? static_cast<double>(symbol_errors) / static_cast<double>(symbols_total) : 0.0;
    }

    BerResult& operator+=(const BerResult& o) noexcept
    {
        bit_errors += o.bit_errors;
        symbol_errors += o.symbol_errors;
        bits_total += o.bits_total;
        symbols_total += o.symbols_total;
        skip_prefix = std::max(skip_prefix, o.skip_prefix);
        recompute();
        return *this;
    }
};

/// Error counts over level indices, ignoring the first `skip_prefix` symbols.
/// Bit errors compare the Gray demapping of both frames.
inline BerResult count_errors(std::span<const std::uint8_t> decided, std::span<const std::uint8_t> truth,
                              std::size_t skip_prefix)
{
    if (decided.size() != truth.size())
        throw AlignmentError("decided length " + std::to_string(decided.size()) + " != truth length " +
                             std::to_string(truth.size()));
    if (skip_prefix >= truth.size() && !truth.empty())
        throw InvalidArgument("skip_prefix must be smaller than the frame length");

    BerResult r;
    r.skip_prefix = skip_prefix;
    for (std::size_t k = skip_prefix; k < truth.size(); ++k) {
        if (decided[k] == truth[k]) continue;
        ++r.symbol_errors;
        const unsigned diff = static_cast<unsigned>(pam4_gray.at(decided[k]) ^ pam4_gray.at(truth[k]));
        r.bit_errors += (diff & 1u) + ((diff >> 1) & 1u);
    }
    r.symbols_total = truth.size() - std::min(skip_prefix, truth.size());
    r.bits_total = 2 * r.symbols_total;
    r.recompute();
    return r;
}

inline BerResult count_errors(const SymbolFrame& decided, const SymbolFrame& truth, std::size_t skip_prefix)
{
    return count_errors(decided.level_index, truth.level_index, skip_prefix);
}

struct CurvePoint {
    double x;
    double ber;
};

/// First x at which the curve drops to `threshold` or below, interpolated
/// linearly in (x, log10 BER) against the preceding point. A zero-BER point
/// has no finite log, so its own x is returned. nullopt if never reached.
inline std::optional<double> threshold_crossing(std::span<const CurvePoint> curve, double threshold)
{
    if (!(threshold > 0.0)) throw InvalidArgument("threshold must be positive");
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (!(curve[i].x >= curve[i - 1].x)) throw InvalidArgument("curve must be sorted by x");

    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve[i].ber > threshold) continue;
        if (i == 0 || curve[i].ber <= 0.0) return curve[i].x;
        const double l0 = std::log10(curve[i - 1].ber);
        const double l1 = std::log10(curve[i].ber);
        const double lt = std::log10(threshold);
        if (l0 == l1) return curve[i].x;
        const double t = (lt - l0) / (l1 - l0);
        return curve[i - 1].x + t * (curve[i].x - curve[i - 1].x);
    }
    return std::nullopt;
}

} // namespace pamsvm

#endif
