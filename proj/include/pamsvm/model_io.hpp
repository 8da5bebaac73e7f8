#ifndef PAMSVM_MODEL_IO_HPP
#define PAMSVM_MODEL_IO_HPP

// JSON form of trained models. Doubles are written shortest-round-trip, so
// load(save(m)) == m exactly.

#include <pamsvm/error.hpp>
#include <pamsvm/lms.hpp>
#include <pamsvm/svm.hpp>

#include <json.hpp>

#include <fstream>
#include <string>

namespace pamsvm {

inline const char* to_string(SvmSolver s) { return s == SvmSolver::pegasos ? "pegasos" : "dual_cd"; }

inline SvmSolver parse_solver(const std::string& s)
{
    if (s == "dual_cd") return SvmSolver::dual_cd;
    if (s == "pegasos") return SvmSolver::pegasos;
    throw InvalidArgument("unknown SVM solver '" + s + "'");
}

inline nlohmann::json to_json(const SvmModel& m)
{
    nlohmann::json planes = nlohmann::json::array();
    for (const auto& p : m.planes) planes.push_back({{"w", p.w}, {"b", p.b}});
    const auto& t = m.training_meta;
    return {
        {"kind", "svm"},
        {"config", {{"ffe_taps", m.config.ffe_taps}, {"dfe_taps", m.config.dfe_taps}}},
        {"planes", planes},
        {"training_meta",
         {{"train_length", t.train_length},
          {"lambda", t.lambda},
          {"epochs", t.epochs},
          {"seed", t.seed},
          {"solver", to_string(t.solver)},
          {"bias_scale", t.bias_scale}}},
    };
}

inline nlohmann::json to_json(const LmsModel& m)
{
    return {
        {"kind", "ffe_dfe"},
        {"config", {{"ffe_taps", m.config.ffe_taps}, {"dfe_taps", m.config.dfe_taps}}},
        {"ffe_weights", m.ffe_weights},
        {"dfe_weights", m.dfe_weights},
        {"step_size", m.step_size},
        {"initial_mse", m.initial_mse},
        {"final_mse", m.final_mse},
    };
}

namespace detail {

inline EqTapConfig tap_config_from_json(const nlohmann::json& j)
{
    EqTapConfig c{j.at("ffe_taps").get<int>(), j.at("dfe_taps").get<int>()};
    c.validate();
    return c;
}

} // namespace detail

inline SvmModel svm_model_from_json(const nlohmann::json& j)
{
    try {
        if (j.at("kind").get<std::string>() != "svm") throw InvalidArgument("model kind is not svm");
        SvmModel m;
        m.config = detail::tap_config_from_json(j.at("config"));
        const auto& planes = j.at("planes");
        if (!planes.is_array() || planes.size() != 3)
            throw InvalidArgument("an SVM model needs exactly 3 planes");
        for (std::size_t i = 0; i < 3; ++i) {
            m.planes[i].w = planes[i].at("w").get<std::vector<double>>();
            m.planes[i].b = planes[i].at("b").get<double>();
            if (m.planes[i].w.size() != m.config.dim())
                throw DimensionError("plane " + std::to_string(i) + " has dimension " +
                                     std::to_string(m.planes[i].w.size()) + ", config needs " +
                                     std::to_string(m.config.dim()));
        }
        const auto& t = j.at("training_meta");
        m.training_meta.train_length = t.at("train_length").get<std::size_t>();
        m.training_meta.lambda = t.at("lambda").get<double>();
        m.training_meta.epochs = t.at("epochs").get<int>();
        m.training_meta.seed = t.at("seed").get<std::uint64_t>();
        m.training_meta.solver = parse_solver(t.value("solver", std::string("dual_cd")));
        m.training_meta.bias_scale = t.value("bias_scale", 0.0);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed SVM model: ") + e.what());
    }
}

inline LmsModel lms_model_from_json(const nlohmann::json& j)
{
    try {
        if (j.at("kind").get<std::string>() != "ffe_dfe") throw InvalidArgument("model kind is not ffe_dfe");
        LmsModel m;
        m.config = detail::tap_config_from_json(j.at("config"));
        m.ffe_weights = j.at("ffe_weights").get<std::vector<double>>();
        m.dfe_weights = j.at("dfe_weights").get<std::vector<double>>();
        m.step_size = j.at("step_size").get<double>();
        m.initial_mse = j.value("initial_mse", 0.0);
        m.final_mse = j.value("final_mse", 0.0);
        if (m.ffe_weights.size() != static_cast<std::size_t>(m.config.ffe_taps) ||
            m.dfe_weights.size() != m.config.feedback())
            throw DimensionError("LMS weight lengths do not match the tap config");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed FFE&DFE model: ") + e.what());
    }
}

inline void save_json(const std::string& path, const nlohmann::json& j)
{
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    os << j.dump(2) << '\n';
    if (!os) throw Error("failed writing " + path);
}

inline nlohmann::json load_json(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path);
    try {
        return nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument(path + ": " + e.what());
    }
}

} // namespace pamsvm

#endif
