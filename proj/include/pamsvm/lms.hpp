#ifndef PAMSVM_LMS_HPP
#define PAMSVM_LMS_HPP

// FFE&DFE baseline: y(k) = ffe . x(k-m..k+m) + dfe . d(k-1..k-n), adapted by
// power-normalized LMS over the training prefix, then run decision-directed
// with a fixed nearest-level slicer.

#include <pamsvm/error.hpp>
#include <pamsvm/features.hpp>

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pamsvm {

struct LmsModel {
    std::vector<double> ffe_weights;
    std::vector<double> dfe_weights;
    EqTapConfig config;
    double step_size{1e-3};
    // Windowed MSE over the first and last tenth of the training pass.
    double initial_mse{0.0};
    double final_mse{0.0};

    bool converged() const noexcept { return final_mse <= initial_mse; }

    double output(std::span<const double> fv) const noexcept
    {
        const std::span<const double> x = fv.first(ffe_weights.size());
        const std::span<const double> d = fv.subspan(ffe_weights.size());
        return dot(ffe_weights, x) + dot(dfe_weights, d);
    }
};

/// Center-spike initial model: a plain slicer.
inline LmsModel lms_initial_model(const EqTapConfig& cfg, double step)
{
    cfg.validate();
    LmsModel m;
    m.config = cfg;
    m.step_size = step;
    m.ffe_weights.assign(static_cast<std::size_t>(cfg.ffe_taps), 0.0);
    m.dfe_weights.assign(cfg.feedback(), 0.0);
    m.ffe_weights[cfg.cursor()] = 1.0;
    return m;
}

/// One LMS pass over the first `train_length` symbols with true labels in
/// the feedback taps. The update is w += step * e * u / (eps + |u|^2 / dim),
/// i.e. the step is normalized by the per-tap input power.
inline LmsModel lms_train(const ReceivedSymbols& rx, const SymbolFrame& labels, const EqTapConfig& cfg, double step,
                          std::size_t train_length)
{
    if (!(step >= 0.0)) throw InvalidArgument("LMS step must be nonnegative");
    if (rx.size() != labels.size()) throw AlignmentError("received and label lengths differ");
    if (train_length > rx.size())
        throw TooShort("train_length " + std::to_string(train_length) + " exceeds the " +
                       std::to_string(rx.size()) + " available symbols");

    ReceivedSymbols head{{rx.values.begin(), rx.values.begin() + static_cast<std::ptrdiff_t>(train_length)},
                         rx.aligned};
    SymbolFrame truth;
    truth.symbols.assign(labels.symbols.begin(), labels.symbols.begin() + static_cast<std::ptrdiff_t>(train_length));
    truth.level_index.assign(labels.level_index.begin(),
                             labels.level_index.begin() + static_cast<std::ptrdiff_t>(train_length));
    const TrainingSet ts = build_train_features(head, truth, cfg);

    LmsModel model = lms_initial_model(cfg, step);
    const std::size_t rows = ts.features.rows();
    const std::size_t dim = cfg.dim();
    const std::size_t nf = model.ffe_weights.size();
    const std::size_t window = std::max<std::size_t>(1, rows / 10);
    constexpr double eps = 1e-9;

    double head_se = 0.0, tail_se = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto u = ts.features.row(r);
        const std::size_t k = ts.features.sample_index[r];
        const double e = labels.symbols[k] - model.output(u);
        if (r < window) head_se += e * e;
        if (r + window >= rows) tail_se += e * e;
        if (step == 0.0) continue;
        const double mu = step / (eps + dot(u, u) / static_cast<double>(dim));
        for (std::size_t j = 0; j < nf; ++j) model.ffe_weights[j] += mu * e * u[j];
        for (std::size_t j = nf; j < dim; ++j) model.dfe_weights[j - nf] += mu * e * u[j];
    }
    model.initial_mse = head_se / static_cast<double>(window);
    model.final_mse = tail_se / static_cast<double>(window);
    return model;
}

inline SymbolFrame lms_equalize(const ReceivedSymbols& rx, const LmsModel& model, std::span<const double> genie = {})
{
    if (model.ffe_weights.size() != static_cast<std::size_t>(model.config.ffe_taps) ||
        model.dfe_weights.size() != model.config.feedback())
        throw DimensionError("LMS weights do not match the tap config");
    return frame_from_levels(decision_feedback_pass(
        rx.values, model.config, [&](std::span<const double> fv) { return slice_level(model.output(fv)); }, genie));
}

} // namespace pamsvm

#endif
