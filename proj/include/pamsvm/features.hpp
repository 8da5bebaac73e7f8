#ifndef PAMSVM_FEATURES_HPP
#define PAMSVM_FEATURES_HPP

// Feature vectors shared by both receivers: a symmetric window of 2m+1
// received samples x(k-m)..x(k+m) followed by n fed-back symbols
// d(k-1)..d(k-n). Positions outside the stream are zero.

#include <pamsvm/channel.hpp>
#include <pamsvm/error.hpp>
#include <pamsvm/txgen.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pamsvm {

struct EqTapConfig {
    int ffe_taps{31};
    int dfe_taps{5};

    static constexpr EqTapConfig lightweight() { return {9, 3}; }
    static constexpr EqTapConfig enhanced() { return {31, 5}; }

    std::size_t half_window() const noexcept { return static_cast<std::size_t>(ffe_taps / 2); }
    std::size_t feedback() const noexcept { return static_cast<std::size_t>(dfe_taps); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(ffe_taps + dfe_taps); }
    /// Index of the cursor sample x(k) inside a feature vector.
    std::size_t cursor() const noexcept { return half_window(); }

    void validate() const
    {
        if (ffe_taps < 1 || ffe_taps % 2 == 0)
            throw InvalidArgument("ffe_taps must be odd and positive, got " + std::to_string(ffe_taps));
        if (dfe_taps < 0)
            throw InvalidArgument("dfe_taps must be nonnegative, got " + std::to_string(dfe_taps));
    }

    friend bool operator==(const EqTapConfig&, const EqTapConfig&) = default;
};

/// Row-major feature matrix; row r describes symbol index sample_index[r].
struct FeatureMatrix {
    std::size_t dim{0};
    std::vector<double> data;
    std::vector<std::size_t> sample_index;

    std::size_t rows() const noexcept { return dim == 0 ? 0 : data.size() / dim; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * dim, dim}; }
};

struct TrainingSet {
    FeatureMatrix features;
    std::vector<std::uint8_t> levels;
    std::size_t source_length{0};  // symbols the vectors were cut from
};

/// Writes the feature vector for symbol k into `out` (size cfg.dim()).
/// `history(j)` returns d(k-j) for 1 <= j <= k.
template <class History>
void fill_features(std::span<const double> rx, std::size_t k, const EqTapConfig& cfg, History&& history,
                   std::span<double> out)
{
    const std::size_t m = cfg.half_window();
    const std::size_t len = rx.size();
    std::size_t i = 0;
    for (std::size_t j = 0; j < 2 * m + 1; ++j, ++i) {
        // sample x(k - m + j)
        const std::size_t pos = k + j;
        out[i] = (pos >= m && pos - m < len) ? rx[pos - m] : 0.0;
    }
    for (std::size_t j = 1; j <= cfg.feedback(); ++j, ++i) out[i] = j <= k ? history(j) : 0.0;
}

/// Training vectors for k in [m, len - m) with true labels in the feedback
/// slots (teacher forcing).
inline TrainingSet build_train_features(const ReceivedSymbols& rx, const SymbolFrame& labels, const EqTapConfig& cfg)
{
    cfg.validate();
    if (!rx.aligned) throw AlignmentError("received symbols are not delay-compensated");
    if (rx.size() != labels.size())
        throw AlignmentError("received length " + std::to_string(rx.size()) + " != label length " +
                             std::to_string(labels.size()));
    const std::size_t m = cfg.half_window();
    const std::size_t len = rx.size();
    if (len < 2 * m + 1 || len <= cfg.feedback())
        throw TooShort("sequence of " + std::to_string(len) + " symbols is shorter than the " +
                       std::to_string(cfg.ffe_taps) + "+" + std::to_string(cfg.dfe_taps) + " window");

    TrainingSet ts;
    ts.source_length = len;
    ts.features.dim = cfg.dim();
    const std::size_t rows = len - 2 * m;
    ts.features.data.resize(rows * cfg.dim());
    ts.features.sample_index.resize(rows);
    ts.levels.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t k = r + m;
        fill_features(rx.values, k, cfg, [&](std::size_t j) { return labels.symbols[k - j]; },
                      std::span<double>(ts.features.data.data() + r * cfg.dim(), cfg.dim()));
        ts.features.sample_index[r] = k;
        ts.levels[r] = labels.level_index[k];
    }
    return ts;
}

/// Sequential decision-feedback pass over the whole stream. `decide` maps a
/// feature vector to a level index; its own past decisions feed the feedback
/// slots unless `genie` (true symbol amplitudes) is supplied.
template <class Decide>
std::vector<std::uint8_t> decision_feedback_pass(std::span<const double> rx, const EqTapConfig& cfg, Decide&& decide,
                                                 std::span<const double> genie = {})
{
    cfg.validate();
    if (rx.size() <= cfg.half_window())
        throw TooShort("stream of " + std::to_string(rx.size()) + " symbols is shorter than the FFE half-window");
    if (!genie.empty() && genie.size() != rx.size())
        throw AlignmentError("genie feedback length does not match received length");

    std::vector<std::uint8_t> levels(rx.size());
    std::vector<double> fv(cfg.dim());
    for (std::size_t k = 0; k < rx.size(); ++k) {
        if (genie.empty())
            fill_features(rx, k, cfg, [&](std::size_t j) { return pam4_levels[levels[k - j]]; }, fv);
        else
            fill_features(rx, k, cfg, [&](std::size_t j) { return genie[k - j]; }, fv);
        levels[k] = decide(std::span<const double>(fv));
    }
    return levels;
}

inline double dot(std::span<const double> a, std::span<const double> b) noexcept
{
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

} // namespace pamsvm

#endif
