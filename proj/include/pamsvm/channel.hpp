#ifndef PAMSVM_CHANNEL_HPP
#define PAMSVM_CHANNEL_HPP

// Discrete-time stand-in for the bandwidth-limited O/E link: Gaussian-shaped
// low-pass ISI, optional tanh saturation, AWGN on an SNR axis, matched RRC
// receive filter and ideal-timing symbol-rate sampling.

#include <pamsvm/error.hpp>
#include <pamsvm/txgen.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <algorithm>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace pamsvm {

struct TxConfig {
    std::uint32_t prbs_seed{1};
    double rolloff{0.1};
    int span_symbols{16};
    int sps{4};
};

struct Nonlinearity {
    double sat_level{3.0};
};

struct ChannelConfig {
    double f3db_norm{0.26};  // 3 dB bandwidth / symbol rate (13 GHz at 50 GBd)
    double snr_db{std::numeric_limits<double>::infinity()};
    std::optional<Nonlinearity> nonlinearity;
    int timing_offset{0};
    std::uint64_t rng_seed{1};
};

struct ReceivedSymbols {
    std::vector<double> values;
    bool aligned{false};

    std::size_t size() const noexcept { return values.size(); }
};

/// Gaussian magnitude response |H(f)| = exp(-ln2/2 * (f/f3)^2), realized as a
/// truncated sampled impulse response of 8*sps+1 taps with unit DC gain.
inline std::vector<double> lowpass_taps(const ChannelConfig& cfg, int sps)
{
    if (sps < 1) throw InvalidArgument("samples per symbol must be >= 1");
    const double nyq = 0.5 * sps;
    if (!(cfg.f3db_norm > 0.0 && cfg.f3db_norm < nyq))
        throw InvalidBandwidth("f3db_norm must lie in (0, " + std::to_string(nyq) + "), got " +
                               std::to_string(cfg.f3db_norm));

    using std::numbers::pi;
    const double sigma_f = cfg.f3db_norm / std::sqrt(std::numbers::ln2);
    const int n = 8 * sps + 1;
    const int half = n / 2;
    std::vector<double> h(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i - half) / sps;
        h[static_cast<std::size_t>(i)] = std::exp(-2.0 * pi * pi * sigma_f * sigma_f * t * t);
        sum += h[static_cast<std::size_t>(i)];
    }
    for (double& v : h) v /= sum;
    return h;
}

inline Waveform apply_isi(const Waveform& wave, std::span<const double> taps) { return shape(wave, taps); }

inline double mean_power(std::span<const double> x)
{
    if (x.empty()) return 0.0;
    double p = 0.0;
    for (double v : x) p += v * v;
    return p / static_cast<double>(x.size());
}

/// Adds white Gaussian noise of variance mean_power(wave) / 10^(snr_db/10).
/// snr_db = +inf leaves the waveform untouched.
inline Waveform add_awgn(const Waveform& wave, double snr_db, std::uint64_t seed)
{
    if (std::isnan(snr_db)) throw InvalidArgument("snr_db is NaN");
    Waveform out = wave;
    if (snr_db == std::numeric_limits<double>::infinity()) return out;
    const double sigma = std::sqrt(mean_power(wave.samples) / std::pow(10.0, snr_db / 10.0));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : out.samples) v += noise(rng);
    return out;
}

/// Memoryless soft saturation y = s * tanh(x / s).
inline Waveform soa_nonlinearity(const Waveform& wave, double sat_level)
{
    if (!(sat_level > 0.0)) throw InvalidArgument("sat_level must be positive");
    Waveform out = wave;
    for (double& v : out.samples) v = sat_level * std::tanh(v / sat_level);
    return out;
}

/// Picks sample k*sps + timing_offset + delay for every transmitted symbol.
inline ReceivedSymbols downsample(const Waveform& wave, int timing_offset)
{
    if (timing_offset < 0 || timing_offset >= wave.sps)
        throw InvalidTimingOffset("timing offset must lie in [0, " + std::to_string(wave.sps) + "), got " +
                                  std::to_string(timing_offset));
    ReceivedSymbols rx;
    rx.values.resize(wave.symbol_count);
    const auto sps = static_cast<std::size_t>(wave.sps);
    for (std::size_t k = 0; k < wave.symbol_count; ++k) {
        const std::size_t idx = k * sps + static_cast<std::size_t>(timing_offset) + wave.delay;
        rx.values[k] = idx < wave.samples.size() ? wave.samples[idx] : 0.0;
    }
    rx.aligned = true;
    return rx;
}

/// downsample(shape(wave, taps), timing_offset), evaluating the filter only at
/// the sampling instants.
inline ReceivedSymbols filter_and_downsample(const Waveform& wave, std::span<const double> taps, int timing_offset)
{
    if (taps.empty()) throw EmptyFilter("filter has no taps");
    if (taps.size() % 2 == 0) throw InvalidArgument("filter length must be odd");
    if (timing_offset < 0 || timing_offset >= wave.sps)
        throw InvalidTimingOffset("timing offset must lie in [0, " + std::to_string(wave.sps) + "), got " +
                                  std::to_string(timing_offset));
    const std::size_t delay = wave.delay + (taps.size() - 1) / 2;
    const auto sps = static_cast<std::size_t>(wave.sps);
    const auto& x = wave.samples;
    ReceivedSymbols rx;
    rx.values.resize(wave.symbol_count);
    for (std::size_t k = 0; k < wave.symbol_count; ++k) {
        // y[n] = sum_j h[j] x[n-j]
        const std::size_t n = k * sps + static_cast<std::size_t>(timing_offset) + delay;
        const std::size_t j_lo = n >= x.size() ? n - x.size() + 1 : 0;
        const std::size_t j_hi = std::min(taps.size() - 1, n);
        double acc = 0.0;
        for (std::size_t j = j_lo; j <= j_hi; ++j) acc += taps[j] * x[n - j];
        rx.values[k] = acc;
    }
    rx.aligned = true;
    return rx;
}

/// Transmit filter and full channel for one realization:
/// upsample -> RRC -> low-pass ISI -> [tanh] -> AWGN -> matched RRC -> sample.
inline ReceivedSymbols run_link(const SymbolFrame& frame, const TxConfig& tx, const ChannelConfig& ch)
{
    const auto rrc = rrc_taps(tx.rolloff, tx.span_symbols, tx.sps);
    const auto lp = lowpass_taps(ch, tx.sps);
    Waveform w = shape(upsample(frame, tx.sps), rrc);
    w = apply_isi(w, lp);
    if (ch.nonlinearity) w = soa_nonlinearity(w, ch.nonlinearity->sat_level);
    w = add_awgn(w, ch.snr_db, ch.rng_seed);
    return filter_and_downsample(w, rrc, ch.timing_offset);
}

/// FNV-1a over the IEEE-754 bytes of the received stream; equal hashes mean
/// two receivers saw byte-identical inputs.
inline std::uint64_t stream_hash(const ReceivedSymbols& rx)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (double v : rx.values) {
        std::uint64_t bits;
        static_assert(sizeof bits == sizeof v);
        std::memcpy(&bits, &v, sizeof v);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffu;
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

} // namespace pamsvm

#endif
