#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mldeg/errors.hpp"
#include "mldeg/likelihood.hpp"
#include "mldeg/parser.hpp"

namespace mldeg {

using Json = nlohmann::ordered_json;

/// Unreadable or malformed model file. Carries a location string such as
/// "byte 17" or "generators[1], position 4".
class ModelFileError : public Error {
public:
    using Error::Error;
};

/// The on-disk model: variables, generator strings, dim, seed, tolerances.
/// Generators are kept as written so that serialization round-trips.
struct ModelFile {
    std::vector<std::string> variables;
    std::vector<std::string> generators;
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    Tolerances tolerances;

    ModelSpec to_model() const {
        ModelSpec m;
        m.variables = variables;
        for (std::size_t j = 0; j < generators.size(); ++j) {
            try {
                m.generators.push_back(parse_poly(generators[j], variables));
            } catch (const ParseError& e) {
                throw ModelFileError("generators[" + std::to_string(j) + "]: " + e.what());
            }
        }
        m.dim = dim;
        m.seed = seed;
        m.tolerances = tolerances;
        m.validate();
        return m;
    }
};

namespace detail {

inline const char* to_string(StartKind k) {
    switch (k) {
    case StartKind::automatic: return "automatic";
    case StartKind::total_degree: return "total_degree";
    case StartKind::linear_product: return "linear_product";
    }
    return "?";
}

inline void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.contains(key)) throw ModelFileError("unknown field '" + key + "' in " + where);
}

inline double read_positive(const Json& v, const std::string& name) {
    if (!v.is_number()) throw ModelFileError(name + " must be a number");
    const double x = v.get<double>();
    if (!(x > 0)) throw ModelFileError(name + " must be positive");
    return x;
}

inline std::uint64_t read_unsigned(const Json& v, const std::string& name) {
    if (!v.is_number_unsigned()) throw ModelFileError(name + " must be a non-negative integer");
    return v.get<std::uint64_t>();
}

inline std::vector<std::string> read_strings(const Json& v, const std::string& name) {
    if (!v.is_array()) throw ModelFileError(name + " must be an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_string()) throw ModelFileError(name + "[" + std::to_string(i) + "] must be a string");
        out.push_back(v[i].get<std::string>());
    }
    return out;
}

inline void read_tracker(const Json& t, TrackerConfig& cfg) {
    if (!t.is_object()) throw ModelFileError("tolerances.tracker must be an object");
    reject_unknown(t,
                   {"initial_step", "min_step", "max_step", "corrector_tolerance", "max_corrector_iterations",
                    "divergence_bound", "endgame_start", "final_tolerance", "dedup_distance", "rank_threshold",
                    "max_refine_iterations", "max_steps_per_path", "retrack_rounds", "start"},
                   "tolerances.tracker");
    auto real = [&](const char* key, double& field) {
        if (t.contains(key)) field = read_positive(t[key], std::string("tolerances.tracker.") + key);
    };
    auto integer = [&](const char* key, auto& field) {
        if (t.contains(key))
            field = static_cast<std::remove_reference_t<decltype(field)>>(
                read_unsigned(t[key], std::string("tolerances.tracker.") + key));
    };
    real("initial_step", cfg.initial_step);
    real("min_step", cfg.min_step);
    real("max_step", cfg.max_step);
    real("corrector_tolerance", cfg.corrector_tolerance);
    integer("max_corrector_iterations", cfg.max_corrector_iterations);
    real("divergence_bound", cfg.divergence_bound);
    real("endgame_start", cfg.endgame_start);
    real("final_tolerance", cfg.final_tolerance);
    real("dedup_distance", cfg.dedup_distance);
    real("rank_threshold", cfg.rank_threshold);
    integer("max_refine_iterations", cfg.max_refine_iterations);
    integer("max_steps_per_path", cfg.max_steps_per_path);
    integer("retrack_rounds", cfg.retrack_rounds);
    if (t.contains("start")) {
        const auto& s = t["start"];
        if (s == "automatic")
            cfg.start = StartKind::automatic;
        else if (s == "total_degree")
            cfg.start = StartKind::total_degree;
        else if (s == "linear_product")
            cfg.start = StartKind::linear_product;
        else
            throw ModelFileError("tolerances.tracker.start must be automatic, total_degree or linear_product");
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw ModelFileError(std::string("tolerances.tracker: ") + e.what());
    }
}

inline Tolerances read_tolerances(const Json& t) {
    if (!t.is_object()) throw ModelFileError("tolerances must be an object");
    reject_unknown(t, {"torus", "generator_residual", "rank", "tracker"}, "tolerances");
    Tolerances tol;
    if (t.contains("torus")) tol.torus = read_positive(t["torus"], "tolerances.torus");
    if (t.contains("generator_residual"))
        tol.generator_residual = read_positive(t["generator_residual"], "tolerances.generator_residual");
    if (t.contains("rank")) tol.rank = read_positive(t["rank"], "tolerances.rank");
    if (t.contains("tracker")) read_tracker(t["tracker"], tol.tracker);
    return tol;
}

} // namespace detail

/// Every tolerance, including defaults, as a JSON object.
inline Json tolerances_to_json(const Tolerances& tol) {
    const auto& c = tol.tracker;
    Json tracker = {{"initial_step", c.initial_step},
                    {"min_step", c.min_step},
                    {"max_step", c.max_step},
                    {"corrector_tolerance", c.corrector_tolerance},
                    {"max_corrector_iterations", c.max_corrector_iterations},
                    {"divergence_bound", c.divergence_bound},
                    {"endgame_start", c.endgame_start},
                    {"final_tolerance", c.final_tolerance},
                    {"dedup_distance", c.dedup_distance},
                    {"rank_threshold", c.rank_threshold},
                    {"max_refine_iterations", c.max_refine_iterations},
                    {"max_steps_per_path", c.max_steps_per_path},
                    {"retrack_rounds", c.retrack_rounds},
                    {"start", detail::to_string(c.start)}};
    return Json{{"torus", tol.torus},
                {"generator_residual", tol.generator_residual},
                {"rank", tol.rank},
                {"tracker", std::move(tracker)}};
}

inline Json to_json(const ModelFile& f) {
    return Json{{"variables", f.variables},
                {"generators", f.generators},
                {"dim", f.dim},
                {"seed", f.seed},
                {"tolerances", tolerances_to_json(f.tolerances)}};
}

/// Reads a model from JSON text. Syntax errors report the byte offset;
/// generator errors report the generator index and offset in its string.
inline ModelFile parse_model_file(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelFileError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!j.is_object()) throw ModelFileError("model file must hold a JSON object");
    detail::reject_unknown(j, {"variables", "generators", "dim", "seed", "tolerances"}, "model file");
    for (const char* key : {"variables", "generators", "dim"})
        if (!j.contains(key)) throw ModelFileError(std::string("missing field '") + key + "'");

    ModelFile f;
    f.variables = detail::read_strings(j["variables"], "variables");
    std::set<std::string> seen;
    for (const auto& v : f.variables) {
        if (v.empty() || !(std::isalpha(static_cast<unsigned char>(v[0])) || v[0] == '_'))
            throw ModelFileError("variable name '" + v + "' is not an identifier");
        for (char ch : v)
            if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'))
                throw ModelFileError("variable name '" + v + "' is not an identifier");
        if (!seen.insert(v).second) throw ModelFileError("duplicate variable '" + v + "'");
    }
    f.generators = detail::read_strings(j["generators"], "generators");
    f.dim = static_cast<std::size_t>(detail::read_unsigned(j["dim"], "dim"));
    if (j.contains("seed")) f.seed = detail::read_unsigned(j["seed"], "seed");
    if (j.contains("tolerances")) f.tolerances = detail::read_tolerances(j["tolerances"]);
    // Surface generator syntax errors at load time.
    for (std::size_t k = 0; k < f.generators.size(); ++k) {
        try {
            (void)parse_poly(f.generators[k], f.variables);
        } catch (const ParseError& e) {
            throw ModelFileError("generators[" + std::to_string(k) + "]: " + e.what());
        }
    }
    return f;
}

inline ModelFile load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelFileError("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_model_file(ss.str());
    } catch (const ModelFileError& e) {
        throw ModelFileError(path + ": " + e.what());
    }
}

} // namespace mldeg
