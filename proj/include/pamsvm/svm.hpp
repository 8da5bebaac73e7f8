#ifndef PAMSVM_SVM_HPP
#define PAMSVM_SVM_HPP

// Linear-kernel SVM equalizer. Four PAM4 levels are separated by three
// ordinal hyperplanes w_j.x + b_j = 0; plane j splits {level <= j} from
// {level > j} and the decided level is the number of positive margins.

#include <pamsvm/error.hpp>
#include <pamsvm/features.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace pamsvm {

struct Hyperplane {
    std::vector<double> w;
    double b{0.0};

    double margin(std::span<const double> x) const noexcept { return dot(w, x) + b; }

    friend bool operator==(const Hyperplane&, const Hyperplane&) = default;
};

enum class SvmSolver {
    dual_cd,  // coordinate ascent on the box-constrained dual, random order per epoch
    pegasos,  // stochastic subgradient on the primal
};

struct SvmParams {
    double lambda{1e-2};
    int epochs{20};
    std::uint64_t seed{1};
    SvmSolver solver{SvmSolver::dual_cd};
    // Constant appended to every feature vector by dual_cd so the bias can be
    // carried in w; the bias is then regularized by lambda/2 (b/bias_scale)^2.
    double bias_scale{10.0};
};

struct SvmTrainingMeta {
    std::size_t train_length{0};
    double lambda{0.0};
    int epochs{0};
    std::uint64_t seed{0};
    SvmSolver solver{SvmSolver::dual_cd};
    double bias_scale{0.0};

    friend bool operator==(const SvmTrainingMeta&, const SvmTrainingMeta&) = default;
};

struct SvmModel {
    std::array<Hyperplane, 3> planes;
    EqTapConfig config;
    SvmTrainingMeta training_meta;

    friend bool operator==(const SvmModel&, const SvmModel&) = default;
};

/// lambda/2 |w|^2 + mean_i max(0, 1 - y_i (w.x_i + b)); the bias is not
/// regularized.
inline double hinge_objective(const Hyperplane& p, const FeatureMatrix& x, std::span<const std::int8_t> y,
                              double lambda)
{
    double loss = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) loss += std::max(0.0, 1.0 - y[r] * p.margin(x.row(r)));
    return 0.5 * lambda * dot(p.w, p.w) + loss / static_cast<double>(x.rows());
}

/// Binary soft-margin SVM by stochastic subgradient descent on the hinge
/// objective above. Step 1/(lambda (t + t0)) with t0 = ceil(1/lambda) keeps
/// the first (unregularized) bias steps bounded; the returned plane is the
/// average of the iterates over the second half of training. Iterates live in
/// mean-centered coordinates, w.(x - mu) + b', which leaves the objective
/// unchanged but keeps an offset cloud from stalling the bias.
inline Hyperplane train_hinge_plane_pegasos(const FeatureMatrix& x, std::span<const std::int8_t> y,
                                            const SvmParams& params)
{
    if (!(params.lambda > 0.0)) throw InvalidArgument("lambda must be positive");
    if (params.epochs < 1) throw InvalidArgument("epochs must be >= 1");
    if (x.rows() == 0) throw DegenerateTrainingSet("no training vectors");
    if (y.size() != x.rows()) throw AlignmentError("label count does not match feature rows");

    const std::size_t n = x.rows();
    const std::size_t d = x.dim;
    const double lambda = params.lambda;
    const double t0 = std::ceil(1.0 / lambda);
    const std::size_t total = n * static_cast<std::size_t>(params.epochs);
    const std::size_t avg_from = total / 2;

    std::vector<double> mu(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mu[j] += x.row(i)[j];
    for (double& v : mu) v /= static_cast<double>(n);

    std::vector<double> w(d, 0.0), w_avg(d, 0.0);
    double b = 0.0, b_avg = 0.0;
    std::size_t averaged = 0;

    std::mt19937_64 rng(params.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::size_t t = 0;
    for (int e = 0; e < params.epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (lambda * (static_cast<double>(t) + t0));
            const auto xi = x.row(i);
            const double yi = y[i];
            const bool violated = yi * (dot(w, xi) - dot(w, mu) + b) < 1.0;
            const double shrink = 1.0 - eta * lambda;
            for (double& v : w) v *= shrink;
            if (violated) {
                for (std::size_t j = 0; j < d; ++j) w[j] += eta * yi * (xi[j] - mu[j]);
                b += eta * yi;
            }
            if (t > avg_from) {
                ++averaged;
                const double a = 1.0 / static_cast<double>(averaged);
                for (std::size_t j = 0; j < d; ++j) w_avg[j] += a * (w[j] - w_avg[j]);
                b_avg += a * (b - b_avg);
            }
        }
    }
    const double b_out = b_avg - dot(w_avg, mu);
    return {std::move(w_avg), b_out};
}

/// Binary soft-margin SVM by dual coordinate descent: with C = 1/(lambda n)
/// the dual is max sum(a) - |sum a_i y_i x_i|^2 / 2 over 0 <= a_i <= C, and
/// each step solves one coordinate exactly. Stops after `epochs` sweeps or
/// once the projected-gradient spread drops below 1e-4.
inline Hyperplane train_hinge_plane_dual(const FeatureMatrix& x, std::span<const std::int8_t> y,
                                         const SvmParams& params)
{
    if (!(params.lambda > 0.0)) throw InvalidArgument("lambda must be positive");
    if (params.epochs < 1) throw InvalidArgument("epochs must be >= 1");
    if (!(params.bias_scale > 0.0)) throw InvalidArgument("bias_scale must be positive");
    if (x.rows() == 0) throw DegenerateTrainingSet("no training vectors");
    if (y.size() != x.rows()) throw AlignmentError("label count does not match feature rows");

    const std::size_t n = x.rows();
    const std::size_t d = x.dim;
    const double c = 1.0 / (params.lambda * static_cast<double>(n));
    const double bs = params.bias_scale;

    std::vector<double> w(d, 0.0);
    double wb = 0.0;  // weight on the constant feature; b = wb * bs
    std::vector<double> alpha(n, 0.0), qdiag(n);
    for (std::size_t i = 0; i < n; ++i) qdiag[i] = dot(x.row(i), x.row(i)) + bs * bs;

    std::mt19937_64 rng(params.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int e = 0; e < params.epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng);
        double pg_max = -std::numeric_limits<double>::infinity();
        double pg_min = std::numeric_limits<double>::infinity();
        for (std::size_t i : order) {
            const auto xi = x.row(i);
            const double yi = y[i];
            const double g = yi * (dot(w, xi) + wb * bs) - 1.0;
            double pg = g;
            if (alpha[i] <= 0.0) pg = std::min(g, 0.0);
            else if (alpha[i] >= c) pg = std::max(g, 0.0);
            pg_max = std::max(pg_max, pg);
            pg_min = std::min(pg_min, pg);
            if (pg == 0.0) continue;
            const double a_new = std::clamp(alpha[i] - g / qdiag[i], 0.0, c);
            const double delta = (a_new - alpha[i]) * yi;
            alpha[i] = a_new;
            for (std::size_t j = 0; j < d; ++j) w[j] += delta * xi[j];
            wb += delta * bs;
        }
        if (pg_max - pg_min < 1e-4) break;
    }
    return {std::move(w), wb * bs};
}

inline Hyperplane train_hinge_plane(const FeatureMatrix& x, std::span<const std::int8_t> y, const SvmParams& params)
{
    return params.solver == SvmSolver::pegasos ? train_hinge_plane_pegasos(x, y, params)
                                               : train_hinge_plane_dual(x, y, params);
}

inline SvmModel svm_train(const TrainingSet& ts, const EqTapConfig& cfg, const SvmParams& params)
{
    cfg.validate();
    if (ts.features.dim != cfg.dim())
        throw DimensionError("feature dimension " + std::to_string(ts.features.dim) + " does not match tap config " +
                             std::to_string(cfg.dim()));
    std::array<std::size_t, 4> counts{};
    for (auto l : ts.levels) {
        if (l > 3) throw InvalidArgument("level index out of range");
        ++counts[l];
    }
    for (std::size_t l = 0; l < 4; ++l)
        if (counts[l] == 0)
            throw DegenerateTrainingSet("training set has no examples of level " + std::to_string(l));

    SvmModel model;
    model.config = cfg;
    model.training_meta = {ts.source_length, params.lambda, params.epochs, params.seed, params.solver,
                           params.bias_scale};
    std::vector<std::int8_t> y(ts.levels.size());
    for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t r = 0; r < y.size(); ++r) y[r] = ts.levels[r] > j ? 1 : -1;
        SvmParams p = params;
        p.seed = params.seed * 3 + j;
        model.planes[j] = train_hinge_plane(ts.features, y, p);
    }
    return model;
}

/// Level = count of planes with strictly positive margin.
inline std::uint8_t svm_classify(std::span<const double> fv, const SvmModel& model)
{
    std::uint8_t level = 0;
    for (const auto& p : model.planes) {
        if (p.w.size() != fv.size())
            throw DimensionError("feature vector has " + std::to_string(fv.size()) + " entries, model expects " +
                                 std::to_string(p.w.size()));
        level += p.margin(fv) > 0.0;
    }
    return level;
}

/// Decision-directed equalization; pass `genie` (true amplitudes) to feed
/// back correct symbols instead of the model's own decisions.
inline SymbolFrame svm_equalize(const ReceivedSymbols& rx, const SvmModel& model, std::span<const double> genie = {})
{
    for (const auto& p : model.planes)
        if (p.w.size() != model.config.dim()) throw DimensionError("model planes do not match its tap config");
    return frame_from_levels(decision_feedback_pass(
        rx.values, model.config, [&](std::span<const double> fv) { return svm_classify(fv, model); }, genie));
}

/// Whether the boundaries projected on the cursor tap, -b_j / w_j[cursor],
/// are nondecreasing. A false result flags a poorly trained model.
inline bool ordinal_boundaries_ordered(const SvmModel& model)
{
    const std::size_t c = model.config.cursor();
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& p : model.planes) {
        if (c >= p.w.size() || !(p.w[c] > 0.0)) return false;
        const double t = -p.b / p.w[c];
        if (t < prev) return false;
        prev = t;
    }
    return true;
}

} // namespace pamsvm

#endif
