#ifndef PAMSVM_SCENARIO_HPP
#define PAMSVM_SCENARIO_HPP

// Scenario files: strict JSON with documented defaults. Unknown keys are
// rejected so a typo in a tap count cannot silently change an experiment.

#include <pamsvm/error.hpp>
#include <pamsvm/model_io.hpp>
#include <pamsvm/sweep.hpp>

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace pamsvm {

enum class ExperimentKind { single, snr_sweep, train_sweep };

inline const char* to_string(ExperimentKind k)
{
    switch (k) {
    case ExperimentKind::single: return "single";
    case ExperimentKind::snr_sweep: return "snr_sweep";
    case ExperimentKind::train_sweep: return "train_sweep";
    }
    return "?";
}

struct OutputConfig {
    std::string path{"results.csv"};
    std::string format{"csv"};  // csv | json
};

struct ScenarioConfig {
    Scenario scenario;
    ExperimentKind kind{ExperimentKind::single};
    std::vector<double> snr_grid;
    std::vector<std::size_t> length_grid;
    OutputConfig output;
    nlohmann::json resolved;  // every field, defaults filled in
};

inline const std::vector<double>& default_snr_grid()
{
    static const std::vector<double> g{8, 9, 10, 11, 12, 13, 14, 15, 16, 17};
    return g;
}

inline const std::vector<std::size_t>& default_length_grid()
{
    static const std::vector<std::size_t> g{250, 500, 1000, 2000, 5000, 10000};
    return g;
}

/// Default operating point for single runs and training-length sweeps.
inline constexpr double default_snr_db = 14.0;

namespace detail {

using json = nlohmann::json;

[[noreturn]] inline void invalid(const std::string& field, const std::string& what)
{
    throw ValidationError(field + ": " + what);
}

inline void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!obj.is_object()) invalid(where.empty() ? "<root>" : where, "must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.contains(key)) invalid(where.empty() ? key : where + "." + key, "unknown key '" + key + "'");
}

inline std::string join(const std::string& where, const std::string& key)
{
    return where.empty() ? key : where + "." + key;
}

/// Reads a real; the strings "inf" / "+inf" / "-inf" stand for infinities.
inline double as_real(const json& v, const std::string& field)
{
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    invalid(field, "expected a number");
}

inline json real_to_json(double v)
{
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    return v;
}

inline long long as_int(const json& v, const std::string& field)
{
    if (v.is_number_integer() || v.is_number_unsigned()) return v.get<long long>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
    }
    invalid(field, "expected an integer");
}

inline double get_real(const json& obj, const std::string& where, const char* key, double dflt)
{
    return obj.contains(key) ? as_real(obj.at(key), join(where, key)) : dflt;
}

inline long long get_int(const json& obj, const std::string& where, const char* key, long long dflt)
{
    return obj.contains(key) ? as_int(obj.at(key), join(where, key)) : dflt;
}

inline std::string get_string(const json& obj, const std::string& where, const char* key, const std::string& dflt)
{
    if (!obj.contains(key)) return dflt;
    if (!obj.at(key).is_string()) invalid(join(where, key), "expected a string");
    return obj.at(key).get<std::string>();
}

inline EqualizerSpec parse_equalizer(const json& j, const std::string& where)
{
    reject_unknown(j, where, {"kind", "name", "ffe_taps", "dfe_taps", "hyperparams"});
    if (!j.contains("kind")) invalid(join(where, "kind"), "is required");
    EqualizerSpec eq;
    const std::string kind = get_string(j, where, "kind", "");
    if (kind == "svm") eq.kind = EqKind::svm;
    else if (kind == "ffe_dfe") eq.kind = EqKind::ffe_dfe;
    else if (kind == "slicer") eq.kind = EqKind::slicer;
    else invalid(join(where, "kind"), "must be one of svm, ffe_dfe, slicer (got '" + kind + "')");

    const bool slicer = eq.kind == EqKind::slicer;
    const long long ffe = get_int(j, where, "ffe_taps", slicer ? 1 : 31);
    const long long dfe = get_int(j, where, "dfe_taps", slicer ? 0 : 5);
    if (ffe < 1) invalid(join(where, "ffe_taps"), "must be positive");
    if (ffe % 2 == 0) invalid(join(where, "ffe_taps"), "ffe_taps must be odd");
    if (dfe < 0) invalid(join(where, "dfe_taps"), "must be nonnegative");
    if (ffe > 4001 || dfe > 4000) invalid(where, "tap counts are unreasonably large");
    if (slicer && (ffe != 1 || dfe != 0)) invalid(where, "a slicer has ffe_taps 1 and dfe_taps 0");
    eq.taps = {static_cast<int>(ffe), static_cast<int>(dfe)};

    const json hp = j.value("hyperparams", json::object());
    const std::string hw = join(where, "hyperparams");
    switch (eq.kind) {
    case EqKind::svm:
        reject_unknown(hp, hw, {"lambda", "epochs", "seed", "solver", "bias_scale"});
        eq.svm.lambda = get_real(hp, hw, "lambda", eq.svm.lambda);
        if (!(eq.svm.lambda > 0.0) || std::isinf(eq.svm.lambda)) invalid(join(hw, "lambda"), "must be positive");
        eq.svm.epochs = static_cast<int>(get_int(hp, hw, "epochs", eq.svm.epochs));
        if (eq.svm.epochs < 1) invalid(join(hw, "epochs"), "must be >= 1");
        {
            const long long s = get_int(hp, hw, "seed", static_cast<long long>(eq.svm.seed));
            if (s < 0) invalid(join(hw, "seed"), "must be nonnegative");
            eq.svm.seed = static_cast<std::uint64_t>(s);
        }
        try {
            eq.svm.solver = parse_solver(get_string(hp, hw, "solver", "dual_cd"));
        } catch (const InvalidArgument& e) {
            invalid(join(hw, "solver"), e.what());
        }
        eq.svm.bias_scale = get_real(hp, hw, "bias_scale", eq.svm.bias_scale);
        if (!(eq.svm.bias_scale > 0.0) || std::isinf(eq.svm.bias_scale))
            invalid(join(hw, "bias_scale"), "must be positive");
        break;
    case EqKind::ffe_dfe:
        reject_unknown(hp, hw, {"step"});
        eq.lms_step = get_real(hp, hw, "step", eq.lms_step);
        if (!(eq.lms_step >= 0.0) || std::isinf(eq.lms_step)) invalid(join(hw, "step"), "must be nonnegative");
        break;
    case EqKind::slicer: reject_unknown(hp, hw, {}); break;
    }
    eq.name = get_string(j, where, "name",
                         slicer ? std::string("slicer")
                                : kind + "_" + std::to_string(eq.taps.ffe_taps) + "x" + std::to_string(eq.taps.dfe_taps));
    if (eq.name.empty() || eq.name.find_first_of(",\n\r\"") != std::string::npos)
        invalid(join(where, "name"), "must be nonempty and free of commas, quotes and newlines");
    return eq;
}

inline json equalizer_to_json(const EqualizerSpec& eq)
{
    json j{{"kind", to_string(eq.kind)}, {"name", eq.name}, {"ffe_taps", eq.taps.ffe_taps},
           {"dfe_taps", eq.taps.dfe_taps}};
    if (eq.kind == EqKind::svm)
        j["hyperparams"] = {{"lambda", eq.svm.lambda}, {"epochs", eq.svm.epochs}, {"seed", eq.svm.seed},
                            {"solver", to_string(eq.svm.solver)}, {"bias_scale", eq.svm.bias_scale}};
    else if (eq.kind == EqKind::ffe_dfe)
        j["hyperparams"] = {{"step", eq.lms_step}};
    else
        j["hyperparams"] = json::object();
    return j;
}

} // namespace detail

/// Validates a parsed scenario document and fills in defaults.
inline ScenarioConfig parse_config(const nlohmann::json& root)
{
    using namespace detail;
    reject_unknown(root, "", {"tx", "channel", "equalizers", "experiment", "output"});
    ScenarioConfig cfg;
    Scenario& sc = cfg.scenario;

    const json tx = root.value("tx", json::object());
    reject_unknown(tx, "tx", {"prbs_seed", "rolloff", "sps", "span_symbols"});
    {
        const long long seed = get_int(tx, "tx", "prbs_seed", sc.tx.prbs_seed);
        if (seed < 1 || seed > 0x7fff) invalid("tx.prbs_seed", "must be a nonzero 15-bit value");
        sc.tx.prbs_seed = static_cast<std::uint32_t>(seed);
        sc.tx.rolloff = get_real(tx, "tx", "rolloff", sc.tx.rolloff);
        if (!(sc.tx.rolloff >= 0.01 && sc.tx.rolloff <= 1.0)) invalid("tx.rolloff", "must lie in [0.01, 1]");
        const long long sps = get_int(tx, "tx", "sps", sc.tx.sps);
        if (sps < 2 || sps > 64) invalid("tx.sps", "must lie in [2, 64]");
        sc.tx.sps = static_cast<int>(sps);
        const long long span = get_int(tx, "tx", "span_symbols", sc.tx.span_symbols);
        if (span < 2 || span % 2 != 0 || span > 512) invalid("tx.span_symbols", "must be an even count in [2, 512]");
        sc.tx.span_symbols = static_cast<int>(span);
    }

    const json ch = root.value("channel", json::object());
    reject_unknown(ch, "channel", {"f3db_norm", "snr_db", "nonlinearity", "timing_offset"});
    sc.channel.f3db_norm = get_real(ch, "channel", "f3db_norm", sc.channel.f3db_norm);
    if (!(sc.channel.f3db_norm > 0.0 && sc.channel.f3db_norm < 0.5 * sc.tx.sps))
        invalid("channel.f3db_norm", "must lie in (0, sps/2) = (0, " + std::to_string(0.5 * sc.tx.sps) + ")");
    sc.channel.snr_db = get_real(ch, "channel", "snr_db", default_snr_db);
    if (std::isnan(sc.channel.snr_db) || sc.channel.snr_db == -std::numeric_limits<double>::infinity())
        invalid("channel.snr_db", "must be finite or inf");
    if (ch.contains("nonlinearity") && !ch.at("nonlinearity").is_null()) {
        const json& nl = ch.at("nonlinearity");
        reject_unknown(nl, "channel.nonlinearity", {"sat_level"});
        if (!nl.contains("sat_level")) invalid("channel.nonlinearity.sat_level", "is required");
        const double s = as_real(nl.at("sat_level"), "channel.nonlinearity.sat_level");
        if (!(s > 0.0) || std::isinf(s)) invalid("channel.nonlinearity.sat_level", "must be positive and finite");
        sc.channel.nonlinearity = Nonlinearity{s};
    }
    {
        const long long off = get_int(ch, "channel", "timing_offset", 0);
        if (off < 0 || off >= sc.tx.sps) invalid("channel.timing_offset", "must lie in [0, sps)");
        sc.channel.timing_offset = static_cast<int>(off);
    }

    if (root.contains("equalizers")) {
        const json& eqs = root.at("equalizers");
        if (!eqs.is_array() || eqs.empty()) invalid("equalizers", "must be a nonempty array");
        for (std::size_t i = 0; i < eqs.size(); ++i)
            sc.equalizers.push_back(parse_equalizer(eqs[i], "equalizers[" + std::to_string(i) + "]"));
    } else {
        sc.equalizers.push_back(parse_equalizer(json{{"kind", "svm"}}, "equalizers[0]"));
        sc.equalizers.push_back(parse_equalizer(json{{"kind", "ffe_dfe"}}, "equalizers[1]"));
    }
    {
        std::set<std::string> names;
        for (const auto& eq : sc.equalizers)
            if (!names.insert(eq.name).second) invalid("equalizers", "duplicate equalizer name '" + eq.name + "'");
    }

    if (!root.contains("experiment")) invalid("experiment.kind", "is required");
    const json& ex = root.at("experiment");
    reject_unknown(ex, "experiment", {"kind", "grid", "n_symbols", "train_length", "seeds"});
    if (!ex.contains("kind")) invalid("experiment.kind", "is required");
    const std::string kind = get_string(ex, "experiment", "kind", "");
    if (kind == "single") cfg.kind = ExperimentKind::single;
    else if (kind == "snr_sweep") cfg.kind = ExperimentKind::snr_sweep;
    else if (kind == "train_sweep") cfg.kind = ExperimentKind::train_sweep;
    else invalid("experiment.kind", "must be one of single, snr_sweep, train_sweep (got '" + kind + "')");

    {
        const long long n = get_int(ex, "experiment", "n_symbols", static_cast<long long>(sc.n_symbols));
        if (n < 1) invalid("experiment.n_symbols", "must be positive");
        sc.n_symbols = static_cast<std::size_t>(n);
        const long long t = get_int(ex, "experiment", "train_length", static_cast<long long>(sc.train_length));
        if (t < 1) invalid("experiment.train_length", "must be positive");
        sc.train_length = static_cast<std::size_t>(t);
    }
    if (ex.contains("seeds")) {
        const json& s = ex.at("seeds");
        if (!s.is_array() || s.empty()) invalid("experiment.seeds", "must be a nonempty array");
        sc.seeds.clear();
        for (std::size_t i = 0; i < s.size(); ++i) {
            const long long v = as_int(s[i], "experiment.seeds[" + std::to_string(i) + "]");
            if (v < 0) invalid("experiment.seeds[" + std::to_string(i) + "]", "must be nonnegative");
            sc.seeds.push_back(static_cast<std::uint64_t>(v));
        }
    }

    const bool has_grid = ex.contains("grid");
    if (has_grid && !ex.at("grid").is_array()) invalid("experiment.grid", "must be an array");
    if (has_grid && ex.at("grid").empty()) invalid("experiment.grid", "must be nonempty");
    switch (cfg.kind) {
    case ExperimentKind::snr_sweep:
        if (has_grid) {
            const json& g = ex.at("grid");
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double v = as_real(g[i], "experiment.grid[" + std::to_string(i) + "]");
                if (std::isnan(v) || v == -std::numeric_limits<double>::infinity())
                    invalid("experiment.grid[" + std::to_string(i) + "]", "must be finite or inf");
                cfg.snr_grid.push_back(v);
            }
            if (!std::is_sorted(cfg.snr_grid.begin(), cfg.snr_grid.end()))
                invalid("experiment.grid", "must be sorted ascending");
        } else {
            cfg.snr_grid = default_snr_grid();
        }
        break;
    case ExperimentKind::train_sweep:
        if (has_grid) {
            const json& g = ex.at("grid");
            for (std::size_t i = 0; i < g.size(); ++i) {
                const long long v = as_int(g[i], "experiment.grid[" + std::to_string(i) + "]");
                if (v < 1) invalid("experiment.grid[" + std::to_string(i) + "]", "training lengths must be positive");
                cfg.length_grid.push_back(static_cast<std::size_t>(v));
            }
            if (!std::is_sorted(cfg.length_grid.begin(), cfg.length_grid.end()))
                invalid("experiment.grid", "must be sorted ascending");
        } else {
            cfg.length_grid = default_length_grid();
        }
        if (cfg.length_grid.back() >= sc.n_symbols)
            invalid("experiment.grid", "largest training length must be below n_symbols");
        break;
    case ExperimentKind::single:
        if (has_grid) invalid("experiment.grid", "is not used by single runs");
        break;
    }
    if (cfg.kind != ExperimentKind::train_sweep) {
        for (const auto& eq : sc.equalizers)
            if (sc.train_length + 2 * eq.taps.half_window() + 1 > sc.n_symbols)
                invalid("experiment.train_length", "leaves no test symbols for " + eq.name);
    }
    for (const auto& eq : sc.equalizers)
        if (eq.kind != EqKind::slicer) {
            const std::size_t shortest = cfg.kind == ExperimentKind::train_sweep ? cfg.length_grid.front()
                                                                                 : sc.train_length;
            if (shortest < 2 * eq.taps.half_window() + 1 || shortest <= eq.taps.feedback())
                invalid(cfg.kind == ExperimentKind::train_sweep ? "experiment.grid" : "experiment.train_length",
                        "shorter than the " + eq.name + " window");
        }

    const json out = root.value("output", json::object());
    reject_unknown(out, "output", {"path", "format"});
    cfg.output.path = get_string(out, "output", "path", cfg.output.path);
    cfg.output.format = get_string(out, "output", "format", cfg.output.format);
    if (cfg.output.format != "csv" && cfg.output.format != "json")
        invalid("output.format", "must be csv or json");
    if (cfg.output.path.empty()) invalid("output.path", "must be nonempty");

    // Fully resolved document for manifests.
    json r;
    r["tx"] = {{"prbs_seed", sc.tx.prbs_seed}, {"rolloff", sc.tx.rolloff}, {"sps", sc.tx.sps},
               {"span_symbols", sc.tx.span_symbols}};
    r["channel"] = {{"f3db_norm", sc.channel.f3db_norm},
                    {"snr_db", real_to_json(sc.channel.snr_db)},
                    {"nonlinearity", sc.channel.nonlinearity ? json{{"sat_level", sc.channel.nonlinearity->sat_level}}
                                                             : json(nullptr)},
                    {"timing_offset", sc.channel.timing_offset}};
    r["equalizers"] = json::array();
    for (const auto& eq : sc.equalizers) r["equalizers"].push_back(equalizer_to_json(eq));
    json grid = json::array();
    for (double g : cfg.snr_grid) grid.push_back(real_to_json(g));
    for (auto g : cfg.length_grid) grid.push_back(g);
    r["experiment"] = {{"kind", to_string(cfg.kind)}, {"n_symbols", sc.n_symbols}, {"train_length", sc.train_length},
                       {"seeds", sc.seeds}};
    if (cfg.kind != ExperimentKind::single) r["experiment"]["grid"] = grid;
    r["output"] = {{"path", cfg.output.path}, {"format", cfg.output.format}};
    cfg.resolved = std::move(r);
    return cfg;
}

/// Parses JSON text; syntax errors report line and column.
inline nlohmann::json parse_config_text(const std::string& text, const std::string& origin)
{
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < upto; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
    }
}

inline nlohmann::json read_config_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str(), path);
}

/// Applies KEY=VALUE where KEY is a dotted path (array elements by index,
/// e.g. equalizers.0.ffe_taps). VALUE is parsed as JSON, falling back to a
/// plain string, so `channel.snr_db=inf` yields the string "inf".
inline void apply_override(nlohmann::json& root, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--set expects KEY=VALUE, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    nlohmann::json* node = &root;
    std::size_t pos = 0;
    while (true) {
        const auto dot = key.find('.', pos);
        const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (part.empty()) throw ValidationError("--set key '" + key + "' has an empty path segment");
        const bool last = dot == std::string::npos;
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                std::size_t used = 0;
                idx = std::stoul(part, &used);
                if (used != part.size()) throw std::invalid_argument(part);
            } catch (const std::exception&) {
                throw ValidationError("--set key '" + key + "': '" + part + "' is not an array index");
            }
            if (idx >= node->size()) throw ValidationError("--set key '" + key + "': index out of range");
            node = &(*node)[idx];
        } else {
            if (node->is_null()) *node = nlohmann::json::object();
            if (!node->is_object()) throw ValidationError("--set key '" + key + "': '" + part + "' is not an object");
            node = &(*node)[part];
        }
        if (last) break;
        pos = dot + 1;
    }
    *node = std::move(value);
}

inline ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {})
{
    nlohmann::json root = read_config_file(path);
    for (const auto& o : overrides) apply_override(root, o);
    return parse_config(root);
}

} // namespace pamsvm

#endif
