#ifndef PAMSVM_CLI_HPP
#define PAMSVM_CLI_HPP

// Command-line driver. Exit codes: 0 success, 2 configuration error,
// 3 runtime error.

#include <pamsvm/model_io.hpp>
#include <pamsvm/scenario.hpp>
#include <pamsvm/sweep.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace pamsvm {

inline constexpr const char* tool_version = "0.1.0";

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_runtime = 3 };

struct CliOptions {
    std::string command;
    std::string config_path;
    std::string out_path;
    std::vector<std::string> overrides;
    unsigned jobs{1};
    std::uint64_t seed_offset{0};
    std::string model_path;
    std::string equalizer;
};

namespace detail {

inline std::string hex64(std::uint64_t v)
{
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline const char* experiment_for(const std::string& cmd)
{
    if (cmd == "sweep-snr") return "snr_sweep";
    if (cmd == "sweep-train") return "train_sweep";
    if (cmd == "simulate") return "single";
    return nullptr;
}

inline void write_results(const SweepReport& rep, const OutputConfig& out, const std::string& path)
{
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    if (out.format == "csv") {
        write_csv(os, rep);
    } else {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& p : rep.points)
            for (const auto& r : p.runs)
                rows.push_back({{"x_kind", rep.x_kind},
                                {"x_value", real_to_json(r.x_value)},
                                {"seed", r.seed},
                                {"equalizer", r.equalizer},
                                {"symbols", r.result.symbols_total},
                                {"bit_errors", r.result.bit_errors},
                                {"symbol_errors", r.result.symbol_errors},
                                {"ber", r.result.ber},
                                {"ser", r.result.ser},
                                {"low_confidence", r.result.low_confidence()}});
        os << rows.dump(2) << '\n';
    }
    if (!os) throw Error("failed writing " + path);
}

inline nlohmann::json manifest(const CliOptions& opt, const ScenarioConfig& cfg, const SweepReport* rep,
                               const std::vector<std::string>& warnings, const nlohmann::json& outputs)
{
    nlohmann::json hashes = nlohmann::json::array();
    if (rep)
        for (const auto& p : rep->points) {
            std::uint64_t last_seed = ~0ull;
            for (const auto& r : p.runs) {
                if (r.seed == last_seed) continue;
                last_seed = r.seed;
                hashes.push_back({{"x_value", real_to_json(r.x_value)}, {"seed", r.seed}, {"fnv1a64", hex64(r.stream_hash)}});
            }
        }
    return {{"tool", "pamsvm"},
            {"version", tool_version},
            {"command", opt.command},
            {"config", cfg.resolved},
            {"seed_offset", opt.seed_offset},
            {"seeds", cfg.scenario.seeds},
            {"stream_hashes", hashes},
            {"warnings", warnings},
            {"outputs", outputs}};
}

inline void print_summary(std::ostream& out, const SweepReport& rep)
{
    char buf[256];
    for (const auto& p : rep.points)
        for (const auto& [name, r] : p.per_equalizer) {
            std::snprintf(buf, sizeof buf, "%s=%s %-16s ber=%.6e ser=%.6e bit_errors=%llu symbols=%llu%s\n",
                          rep.x_kind.c_str(), format_number(p.x_value).c_str(), name.c_str(), r.ber, r.ser,
                          static_cast<unsigned long long>(r.bit_errors),
                          static_cast<unsigned long long>(r.symbols_total), r.low_confidence() ? " (low confidence)" : "");
            out << buf;
        }
}

inline const EqualizerSpec& pick_equalizer(const Scenario& sc, const std::string& name)
{
    for (const auto& eq : sc.equalizers)
        if (eq.kind != EqKind::slicer && (name.empty() || eq.name == name)) return eq;
    throw ValidationError(name.empty() ? "equalizers: no trainable equalizer (svm or ffe_dfe) configured"
                                       : "--equalizer: no trainable equalizer named '" + name + "'");
}

/// Evaluates a stored model on one realization per seed.
inline SweepReport evaluate_model(const ScenarioConfig& cfg, const nlohmann::json& model_doc, const std::string& name,
                                  unsigned jobs)
{
    const Scenario& sc = cfg.scenario;
    const std::string kind = model_doc.at("kind").get<std::string>();
    SvmModel svm;
    LmsModel lms;
    EqTapConfig taps;
    if (kind == "svm") {
        svm = svm_model_from_json(model_doc);
        taps = svm.config;
    } else if (kind == "ffe_dfe") {
        lms = lms_model_from_json(model_doc);
        taps = lms.config;
    } else {
        throw InvalidArgument("unknown model kind '" + kind + "'");
    }
    const std::size_t m = taps.half_window();
    const std::size_t skip = std::max(m, taps.feedback());
    const SymbolFrame frame = make_frame(sc.tx, sc.n_symbols);
    const std::size_t from = std::min(sc.train_length, sc.n_symbols);
    if (from + skip + m >= sc.n_symbols) throw TooShort("no symbols left to evaluate the model on");

    std::vector<std::vector<RunRecord>> per_unit(sc.seeds.size());
    std::vector<std::vector<std::string>> warn(sc.seeds.size());
    parallel_for(sc.seeds.size(), jobs, [&](std::size_t s) {
        ChannelConfig ch = sc.channel;
        ch.rng_seed = sc.seeds[s];
        const ReceivedSymbols rx = run_link(frame, sc.tx, ch);
        const ReceivedSymbols test = slice_rx(rx, from, rx.size());
        const auto decided = kind == "svm" ? svm_equalize(test, svm).level_index : lms_equalize(test, lms).level_index;
        const std::size_t end = decided.size() - m;
        const BerResult r = count_errors(std::span<const std::uint8_t>(decided).first(end),
                                         std::span<const std::uint8_t>(frame.level_index).subspan(from, end), skip);
        per_unit[s].push_back({sc.channel.snr_db, sc.seeds[s], name, r, stream_hash(rx)});
    });
    SweepReport rep;
    rep.x_kind = "snr_db";
    assemble(rep, {sc.channel.snr_db}, sc, per_unit, warn);
    return rep;
}

inline int execute(const CliOptions& opt, std::ostream& out, std::ostream& err)
{
    nlohmann::json root = read_config_file(opt.config_path);
    if (const char* kind = experiment_for(opt.command)) {
        if (!root.is_object()) throw ValidationError("<root>: must be an object");
        if (!root.contains("experiment") || !root["experiment"].is_object()) root["experiment"] = nlohmann::json::object();
        const bool kind_changes = root["experiment"].value("kind", std::string()) != kind;
        root["experiment"]["kind"] = kind;
        // A grid written for another experiment kind does not carry over.
        if (kind_changes) root["experiment"].erase("grid");
    }
    for (const auto& o : opt.overrides) apply_override(root, o);
    ScenarioConfig cfg = parse_config(root);
    for (auto& s : cfg.scenario.seeds) s += opt.seed_offset;
    cfg.resolved["experiment"]["seeds"] = cfg.scenario.seeds;
    const std::string out_path = opt.out_path.empty() ? cfg.output.path : opt.out_path;
    const std::string manifest_path = out_path + ".manifest.json";

    if (opt.command == "train-model") {
        const EqualizerSpec& eq = pick_equalizer(cfg.scenario, opt.equalizer);
        const Scenario& sc = cfg.scenario;
        if (sc.train_length > sc.n_symbols) throw ValidationError("experiment.train_length: exceeds n_symbols");
        const SymbolFrame frame = make_frame(sc.tx, sc.n_symbols);
        ChannelConfig ch = sc.channel;
        ch.rng_seed = sc.seeds.front();
        const ReceivedSymbols rx = run_link(frame, sc.tx, ch);
        std::vector<std::string> warnings;
        nlohmann::json model;
        if (eq.kind == EqKind::svm) {
            const TrainingSet ts = build_train_features(detail::slice_rx(rx, 0, sc.train_length),
                                                        detail::slice_frame(frame, 0, sc.train_length), eq.taps);
            const SvmModel m = svm_train(ts, eq.taps, eq.svm);
            if (!ordinal_boundaries_ordered(m)) warnings.push_back(eq.name + ": ordinal boundaries out of order");
            model = to_json(m);
        } else {
            const LmsModel m = lms_train(rx, frame, eq.taps, eq.lms_step, sc.train_length);
            if (!m.converged()) warnings.push_back(eq.name + ": LMS did not converge");
            model = to_json(m);
        }
        model["name"] = eq.name;
        save_json(out_path, model);
        nlohmann::json hashes = nlohmann::json::array();
        hashes.push_back({{"x_value", real_to_json(ch.snr_db)}, {"seed", ch.rng_seed}, {"fnv1a64", hex64(stream_hash(rx))}});
        auto man = manifest(opt, cfg, nullptr, warnings, {{"model", out_path}});
        man["stream_hashes"] = hashes;
        save_json(manifest_path, man);
        for (const auto& w : warnings) err << "warning: " << w << '\n';
        out << "wrote " << eq.name << " model to " << out_path << '\n';
        return exit_ok;
    }

    SweepReport rep;
    if (opt.command == "eval-model") {
        if (opt.model_path.empty()) throw ValidationError("--model: eval-model needs a model file");
        nlohmann::json doc;
        try {
            doc = load_json(opt.model_path);
        } catch (const Error& e) {
            throw ConfigError(std::string("--model: ") + e.what());
        }
        const std::string name = doc.value("name", doc.value("kind", std::string("model")));
        rep = evaluate_model(cfg, doc, name, opt.jobs);
    } else if (cfg.kind == ExperimentKind::snr_sweep) {
        rep = sweep_snr(cfg.scenario, cfg.snr_grid, opt.jobs);
    } else if (cfg.kind == ExperimentKind::train_sweep) {
        rep = sweep_training_length(cfg.scenario, cfg.length_grid, opt.jobs);
    } else {
        rep = run_single(cfg.scenario, opt.jobs);
    }
    write_results(rep, cfg.output, out_path);
    save_json(manifest_path, manifest(opt, cfg, &rep, rep.warnings, {{"results", out_path}}));
    for (const auto& w : rep.warnings) err << "warning: " << w << '\n';
    print_summary(out, rep);
    return exit_ok;
}

} // namespace detail

/// Parses argv and runs one subcommand.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"PAM4 SVM / FFE&DFE equalizer simulator"};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1, 1);
    CliOptions opt;

    const std::vector<std::pair<const char*, const char*>> commands{
        {"simulate", "single operating point at channel.snr_db"},
        {"sweep-snr", "BER against SNR for every configured equalizer"},
        {"sweep-train", "BER against training length"},
        {"train-model", "train one equalizer and write its model JSON"},
        {"eval-model", "evaluate a stored model JSON"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config_path, "scenario JSON file")->required();
        sub->add_option("--out", opt.out_path, "output path (overrides output.path)");
        sub->add_option("--set", opt.overrides, "override KEY=VALUE after loading (repeatable)");
        sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed-offset", opt.seed_offset, "added to every experiment seed");
        if (std::string(name) == "eval-model")
            sub->add_option("--model", opt.model_path, "model JSON written by train-model")->required();
        if (std::string(name) == "train-model")
            sub->add_option("--equalizer", opt.equalizer, "name of the equalizer to train (default: first)");
        sub->callback([&opt, name = std::string(name)] { opt.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        return detail::execute(opt, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime;
    }
}

} // namespace pamsvm

#endif
