#ifndef PAMSVM_TXGEN_HPP
#define PAMSVM_TXGEN_HPP

// Transmit side: PRBS15 bits, Gray-mapped PAM4 symbols, upsampling and
// root-raised-cosine pulse shaping.

#include <pamsvm/error.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace pamsvm {

enum class BitOrigin { prbs15, external };

struct BitSequence {
    std::vector<std::uint8_t> bits;
    BitOrigin origin{BitOrigin::external};
};

/// Centered PAM4 alphabet, indexed by level.
inline constexpr std::array<double, 4> pam4_levels{-3.0, -1.0, 1.0, 3.0};

/// Gray code per level: -3 -> 00, -1 -> 01, +1 -> 11, +3 -> 10 (MSB first).
inline constexpr std::array<std::uint8_t, 4> pam4_gray{0b00, 0b01, 0b11, 0b10};

struct SymbolFrame {
    std::vector<double> symbols;
    BitSequence source_bits;
    std::vector<std::uint8_t> level_index;

    std::size_t size() const noexcept { return symbols.size(); }
};

/// Real-valued waveform at `sps` samples per symbol. Filtering stages pad
/// both ends, so samples.size() == sps * symbol_count + 2 * delay and the
/// first symbol's peak sits at sample index `delay`.
struct Waveform {
    std::vector<double> samples;
    int sps{1};
    std::size_t symbol_count{0};
    std::size_t delay{0};
};

inline double level_to_amplitude(std::uint8_t level) { return pam4_levels.at(level); }

/// Nearest alphabet level for a value that is already on the grid.
inline std::uint8_t amplitude_to_level(double a)
{
    const double idx = std::round((a + 3.0) / 2.0);
    if (!(idx >= 0.0 && idx <= 3.0) || std::abs(a - pam4_levels[static_cast<std::size_t>(idx)]) > 1e-9)
        throw InvalidArgument("amplitude " + std::to_string(a) + " is not a PAM4 level");
    return static_cast<std::uint8_t>(idx);
}

/// Maximal-length LFSR for x^15 + x^14 + 1. The register holds 15 bits; the
/// all-zero state is absorbing so it is rejected.
inline BitSequence prbs15_generate(std::uint32_t seed, std::size_t length)
{
    if (seed == 0 || seed > 0x7fffu)
        throw InvalidSeed("PRBS15 seed must be a nonzero 15-bit value, got " + std::to_string(seed));
    if (length == 0)
        throw InvalidArgument("PRBS15 length must be positive");

    BitSequence out{{}, BitOrigin::prbs15};
    out.bits.resize(length);
    std::uint32_t state = seed;
    for (auto& b : out.bits) {
        const std::uint32_t fb = ((state >> 14) ^ (state >> 13)) & 1u;
        state = ((state << 1) | fb) & 0x7fffu;
        b = static_cast<std::uint8_t>(fb);
    }
    return out;
}

inline SymbolFrame map_pam4(const BitSequence& bits)
{
    const auto n = bits.bits.size();
    if (n % 2 != 0)
        throw OddBitCount("PAM4 mapping needs an even bit count, got " + std::to_string(n));

    SymbolFrame f;
    f.source_bits = bits;
    f.symbols.resize(n / 2);
    f.level_index.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const std::uint8_t hi = bits.bits[2 * k], lo = bits.bits[2 * k + 1];
        if (hi > 1 || lo > 1)
            throw InvalidArgument("bit sequence contains a non-binary value");
        const std::uint8_t code = static_cast<std::uint8_t>((hi << 1) | lo);
        std::uint8_t level = 0;
        while (pam4_gray[level] != code) ++level;
        f.level_index[k] = level;
        f.symbols[k] = pam4_levels[level];
    }
    return f;
}

/// Inverse of map_pam4 on level indices.
inline BitSequence demap_pam4(std::span<const std::uint8_t> levels)
{
    BitSequence out;
    out.bits.resize(2 * levels.size());
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const std::uint8_t code = pam4_gray.at(levels[k]);
        out.bits[2 * k] = static_cast<std::uint8_t>(code >> 1);
        out.bits[2 * k + 1] = static_cast<std::uint8_t>(code & 1u);
    }
    return out;
}

/// Nearest-level slicer with midpoint thresholds {-2, 0, +2}; a value
/// exactly on a threshold goes to the lower level.
inline std::uint8_t slice_level(double y) noexcept
{
    return static_cast<std::uint8_t>((y > -2.0) + (y > 0.0) + (y > 2.0));
}

/// Frame built from decided level indices; source_bits holds their Gray demapping.
inline SymbolFrame frame_from_levels(std::vector<std::uint8_t> levels)
{
    SymbolFrame f;
    f.symbols.resize(levels.size());
    for (std::size_t k = 0; k < levels.size(); ++k) f.symbols[k] = level_to_amplitude(levels[k]);
    f.source_bits = demap_pam4(levels);
    f.level_index = std::move(levels);
    return f;
}

/// Root-raised-cosine taps spanning `span_symbols` symbols at `sps`, scaled to
/// unit energy so a matched pair has unit gain at the cursor.
inline std::vector<double> rrc_taps(double rolloff, int span_symbols, int sps)
{
    if (!(rolloff > 0.0 && rolloff <= 1.0))
        throw InvalidRolloff("RRC rolloff must lie in (0, 1], got " + std::to_string(rolloff));
    if (span_symbols <= 0 || span_symbols % 2 != 0)
        throw InvalidArgument("RRC span must be a positive even symbol count");
    if (sps <= 0)
        throw InvalidArgument("samples per symbol must be positive");

    using std::numbers::pi;
    const double b = rolloff;
    const int n = span_symbols * sps + 1;
    const int half = n / 2;
    std::vector<double> h(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i - half) / sps;
        double v;
        if (i == half) {
            v = 1.0 - b + 4.0 * b / pi;
        } else if (std::abs(std::abs(4.0 * b * t) - 1.0) < 1e-12) {
            v = b / std::sqrt(2.0) *
                ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * b)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * b)));
        } else {
            v = (std::sin(pi * t * (1.0 - b)) + 4.0 * b * t * std::cos(pi * t * (1.0 + b))) /
                (pi * t * (1.0 - (4.0 * b * t) * (4.0 * b * t)));
        }
        h[static_cast<std::size_t>(i)] = v;
    }
    // Force exact symmetry before normalizing; the formula is even in t but
    // floating evaluation is not bit-symmetric.
    for (int i = 0; i < half; ++i) h[static_cast<std::size_t>(n - 1 - i)] = h[static_cast<std::size_t>(i)];
    double e = 0.0;
    for (double v : h) e += v * v;
    const double s = 1.0 / std::sqrt(e);
    for (double& v : h) v *= s;
    return h;
}

inline Waveform upsample(const SymbolFrame& frame, int sps)
{
    if (sps < 1) throw InvalidArgument("samples per symbol must be >= 1");
    Waveform w;
    w.sps = sps;
    w.symbol_count = frame.size();
    w.samples.assign(frame.size() * static_cast<std::size_t>(sps), 0.0);
    for (std::size_t k = 0; k < frame.size(); ++k) w.samples[k * static_cast<std::size_t>(sps)] = frame.symbols[k];
    return w;
}

/// Full linear convolution.
inline std::vector<double> convolve(std::span<const double> x, std::span<const double> h)
{
    if (h.empty()) throw EmptyFilter("filter has no taps");
    if (x.empty()) return {};
    std::vector<double> y(x.size() + h.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        double* out = y.data() + i;
        for (std::size_t j = 0; j < h.size(); ++j) out[j] += xi * h[j];
    }
    return y;
}

/// Filters `wave` with an odd-length linear-phase FIR, accumulating its group
/// delay (taps.size()-1)/2 in the delay field.
inline Waveform shape(const Waveform& wave, std::span<const double> taps)
{
    if (taps.empty()) throw EmptyFilter("filter has no taps");
    if (taps.size() % 2 == 0)
        throw InvalidArgument("filter length must be odd so its group delay is an integer sample count");
    Waveform out;
    out.sps = wave.sps;
    out.symbol_count = wave.symbol_count;
    out.delay = wave.delay + (taps.size() - 1) / 2;
    out.samples = convolve(wave.samples, taps);
    return out;
}

} // namespace pamsvm

#endif
