#ifndef PAMSVM_SWEEP_HPP
#define PAMSVM_SWEEP_HPP

// Experiment drivers: SNR waterfalls, training-length sweeps and single-point
// runs. Every equalizer in a scenario sees the same received stream for a
// given (x, seed) so comparisons are paired.

#include <pamsvm/channel.hpp>
#include <pamsvm/error.hpp>
#include <pamsvm/lms.hpp>
#include <pamsvm/metrics.hpp>
#include <pamsvm/svm.hpp>
#include <pamsvm/txgen.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace pamsvm {

enum class EqKind { svm, ffe_dfe, slicer };

inline const char* to_string(EqKind k)
{
    switch (k) {
    case EqKind::svm: return "svm";
    case EqKind::ffe_dfe: return "ffe_dfe";
    case EqKind::slicer: return "slicer";
    }
    return "?";
}

struct EqualizerSpec {
    std::string name;
    EqKind kind{EqKind::svm};
    EqTapConfig taps{EqTapConfig::enhanced()};
    SvmParams svm{};
    double lms_step{1e-3};
};

struct Scenario {
    TxConfig tx{};
    ChannelConfig channel{};
    std::vector<EqualizerSpec> equalizers;
    std::size_t n_symbols{1'000'000};
    std::size_t train_length{5000};
    std::vector<std::uint64_t> seeds{1, 2, 3};
};

/// Result of one equalizer on one (x, seed) realization.
struct RunRecord {
    double x_value{0.0};
    std::uint64_t seed{0};
    std::string equalizer;
    BerResult result;
    std::uint64_t stream_hash{0};
};

struct SweepPoint {
    double x_value{0.0};
    std::map<std::string, BerResult> per_equalizer;  // summed over seeds
    std::vector<std::uint64_t> seeds;
    std::vector<RunRecord> runs;  // ordered by (seed, equalizer)
};

struct SweepReport {
    std::string x_kind;
    std::vector<SweepPoint> points;
    std::vector<std::string> warnings;

    std::vector<CurvePoint> curve(const std::string& equalizer) const
    {
        std::vector<CurvePoint> c;
        for (const auto& p : points) c.push_back({p.x_value, p.per_equalizer.at(equalizer).ber});
        return c;
    }
};

inline SymbolFrame make_frame(const TxConfig& tx, std::size_t n_symbols)
{
    if (n_symbols == 0) throw TooShort("n_symbols must be positive");
    return map_pam4(prbs15_generate(tx.prbs_seed, 2 * n_symbols));
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
/// thrown by any unit is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn)
{
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!failure) failure = std::current_exception();
                    next = n;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

namespace detail {

inline ReceivedSymbols slice_rx(const ReceivedSymbols& rx, std::size_t from, std::size_t to)
{
    return {{rx.values.begin() + static_cast<std::ptrdiff_t>(from), rx.values.begin() + static_cast<std::ptrdiff_t>(to)},
            rx.aligned};
}

inline SymbolFrame slice_frame(const SymbolFrame& f, std::size_t from, std::size_t to)
{
    return frame_from_levels({f.level_index.begin() + static_cast<std::ptrdiff_t>(from),
                              f.level_index.begin() + static_cast<std::ptrdiff_t>(to)});
}

struct EvalOutcome {
    BerResult result;
    std::vector<std::string> warnings;
};

} // namespace detail

/// Trains `eq` on rx[0, train_length) and counts errors on rx[test_from, end).
/// The test segment is equalized from a cold start; its first max(m, n)
/// decisions and its last m (whose window runs past the end) are not counted.
inline detail::EvalOutcome evaluate_equalizer(const EqualizerSpec& eq, const ReceivedSymbols& rx,
                                              const SymbolFrame& truth, std::size_t train_length,
                                              std::size_t test_from)
{
    detail::EvalOutcome out;
    const std::size_t m = eq.taps.half_window();
    const std::size_t skip = eq.kind == EqKind::slicer ? 0 : std::max(m, eq.taps.feedback());
    const std::size_t tail = eq.kind == EqKind::slicer ? 0 : m;
    if (test_from + skip + tail >= rx.size())
        throw TooShort("no symbols left for testing after " + std::to_string(test_from) + " training symbols");

    const ReceivedSymbols test_rx = detail::slice_rx(rx, test_from, rx.size());
    std::vector<std::uint8_t> decided;
    switch (eq.kind) {
    case EqKind::slicer:
        decided.resize(test_rx.size());
        std::transform(test_rx.values.begin(), test_rx.values.end(), decided.begin(), slice_level);
        break;
    case EqKind::svm: {
        const TrainingSet ts = build_train_features(detail::slice_rx(rx, 0, train_length),
                                                    detail::slice_frame(truth, 0, train_length), eq.taps);
        const SvmModel model = svm_train(ts, eq.taps, eq.svm);
        if (!ordinal_boundaries_ordered(model))
            out.warnings.push_back(eq.name + ": ordinal boundaries out of order (model-quality warning)");
        decided = svm_equalize(test_rx, model).level_index;
        break;
    }
    case EqKind::ffe_dfe: {
        const LmsModel model = lms_train(rx, truth, eq.taps, eq.lms_step, train_length);
        if (!model.converged())
            out.warnings.push_back(eq.name + ": LMS did not converge (final MSE above initial MSE)");
        decided = lms_equalize(test_rx, model).level_index;
        break;
    }
    }
    const std::size_t end = decided.size() - tail;
    out.result = count_errors(std::span<const std::uint8_t>(decided).first(end),
                              std::span<const std::uint8_t>(truth.level_index).subspan(test_from, end), skip);
    return out;
}

namespace detail {

struct Unit {
    double x;
    std::uint64_t seed;
};

inline void validate_scenario(const Scenario& sc)
{
    if (sc.equalizers.empty()) throw InvalidArgument("scenario has no equalizers");
    if (sc.seeds.empty()) throw InvalidArgument("scenario has no seeds");
    for (const auto& eq : sc.equalizers) eq.taps.validate();
}

inline void assemble(SweepReport& rep, const std::vector<double>& xs, const Scenario& sc,
                     std::vector<std::vector<RunRecord>>& per_unit, std::vector<std::vector<std::string>>& warn)
{
    std::size_t u = 0;
    for (double x : xs) {
        SweepPoint pt;
        pt.x_value = x;
        pt.seeds = sc.seeds;
        for (std::size_t s = 0; s < sc.seeds.size(); ++s, ++u) {
            for (auto& r : per_unit[u]) {
                pt.per_equalizer[r.equalizer] += r.result;
                pt.runs.push_back(std::move(r));
            }
            for (auto& w : warn[u]) rep.warnings.push_back(std::move(w));
        }
        for (const auto& [name, res] : pt.per_equalizer)
            if (res.low_confidence()) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "%s=%g: %s counted only %llu bit errors (low confidence)",
                              rep.x_kind.c_str(), x, name.c_str(), static_cast<unsigned long long>(res.bit_errors));
                rep.warnings.emplace_back(buf);
            }
        std::stable_sort(pt.runs.begin(), pt.runs.end(), [](const RunRecord& a, const RunRecord& b) {
            return a.seed != b.seed ? a.seed < b.seed : a.equalizer < b.equalizer;
        });
        rep.points.push_back(std::move(pt));
    }
}

} // namespace detail

/// One realization per (snr, seed); the seed drives the noise stream, so the
/// same seed at different SNRs reuses the same noise shape.
inline SweepReport sweep_snr(const Scenario& sc, const std::vector<double>& snr_grid, unsigned jobs = 1)
{
    detail::validate_scenario(sc);
    if (snr_grid.empty()) throw InvalidArgument("SNR grid is empty");
    const SymbolFrame frame = make_frame(sc.tx, sc.n_symbols);

    std::vector<detail::Unit> units;
    for (double x : snr_grid)
        for (auto s : sc.seeds) units.push_back({x, s});
    std::vector<std::vector<RunRecord>> per_unit(units.size());
    std::vector<std::vector<std::string>> warn(units.size());

    parallel_for(units.size(), jobs, [&](std::size_t i) {
        ChannelConfig ch = sc.channel;
        ch.snr_db = units[i].x;
        ch.rng_seed = units[i].seed;
        const ReceivedSymbols rx = run_link(frame, sc.tx, ch);
        const std::uint64_t h = stream_hash(rx);
        for (const auto& eq : sc.equalizers) {
            auto o = evaluate_equalizer(eq, rx, frame, sc.train_length, sc.train_length);
            per_unit[i].push_back({units[i].x, units[i].seed, eq.name, o.result, h});
            for (auto& w : o.warnings) warn[i].push_back(std::move(w));
        }
    });

    SweepReport rep;
    rep.x_kind = "snr_db";
    detail::assemble(rep, snr_grid, sc, per_unit, warn);
    return rep;
}

/// One realization per seed at sc.channel.snr_db. Each equalizer is trained on
/// the first L symbols for every L in the grid and tested on the tail after
/// the largest L, so all lengths share the same test symbols.
inline SweepReport sweep_training_length(const Scenario& sc, const std::vector<std::size_t>& lengths,
                                         unsigned jobs = 1)
{
    detail::validate_scenario(sc);
    if (lengths.empty()) throw InvalidArgument("training-length grid is empty");
    if (!std::is_sorted(lengths.begin(), lengths.end()))
        throw InvalidArgument("training-length grid must be sorted ascending");
    if (lengths.front() == 0) throw TooShort("training length 0 cannot train an equalizer");
    const std::size_t max_len = lengths.back();
    if (max_len >= sc.n_symbols)
        throw TooShort("largest training length " + std::to_string(max_len) + " leaves no test symbols out of " +
                       std::to_string(sc.n_symbols));
    const SymbolFrame frame = make_frame(sc.tx, sc.n_symbols);

    std::vector<std::vector<RunRecord>> per_seed(sc.seeds.size());
    std::vector<std::vector<std::string>> warn_seed(sc.seeds.size());
    parallel_for(sc.seeds.size(), jobs, [&](std::size_t s) {
        ChannelConfig ch = sc.channel;
        ch.rng_seed = sc.seeds[s];
        const ReceivedSymbols rx = run_link(frame, sc.tx, ch);
        const std::uint64_t h = stream_hash(rx);
        for (std::size_t len : lengths)
            for (const auto& eq : sc.equalizers) {
                auto o = evaluate_equalizer(eq, rx, frame, len, max_len);
                per_seed[s].push_back({static_cast<double>(len), sc.seeds[s], eq.name, o.result, h});
                for (auto& w : o.warnings) warn_seed[s].push_back(std::to_string(len) + ": " + w);
            }
    });

    // Regroup seed-major results into (length, seed) units.
    std::vector<double> xs(lengths.begin(), lengths.end());
    std::vector<std::vector<RunRecord>> per_unit(xs.size() * sc.seeds.size());
    std::vector<std::vector<std::string>> warn(per_unit.size());
    for (std::size_t s = 0; s < sc.seeds.size(); ++s) {
        for (auto& r : per_seed[s]) {
            const auto li = static_cast<std::size_t>(
                std::lower_bound(xs.begin(), xs.end(), r.x_value) - xs.begin());
            per_unit[li * sc.seeds.size() + s].push_back(std::move(r));
        }
        for (auto& w : warn_seed[s]) warn[s].push_back(std::move(w));
    }
    SweepReport rep;
    rep.x_kind = "train_length";
    detail::assemble(rep, xs, sc, per_unit, warn);
    return rep;
}

/// Single operating point at sc.channel.snr_db.
inline SweepReport run_single(const Scenario& sc, unsigned jobs = 1)
{
    return sweep_snr(sc, {sc.channel.snr_db}, jobs);
}

inline std::string format_number(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline constexpr const char* csv_header = "x_kind,x_value,seed,equalizer,symbols,bit_errors,ber,ser,low_confidence";

/// One row per (point, seed, equalizer), ordered by x, seed, equalizer name.
inline void write_csv(std::ostream& os, const SweepReport& rep)
{
    os << csv_header << '\n';
    std::vector<const RunRecord*> rows;
    for (const auto& p : rep.points)
        for (const auto& r : p.runs) rows.push_back(&r);
    std::stable_sort(rows.begin(), rows.end(), [](const RunRecord* a, const RunRecord* b) {
        if (a->x_value != b->x_value) return a->x_value < b->x_value;
        if (a->seed != b->seed) return a->seed < b->seed;
        return a->equalizer < b->equalizer;
    });
    for (const RunRecord* r : rows) {
        os << rep.x_kind << ',' << format_number(r->x_value) << ',' << r->seed << ',' << r->equalizer << ','
           << r->result.symbols_total << ',' << r->result.bit_errors << ',' << format_number(r->result.ber) << ','
           << format_number(r->result.ser) << ',' << (r->result.low_confidence() ? "true" : "false") << '\n';
    }
}

} // namespace pamsvm

#endif
