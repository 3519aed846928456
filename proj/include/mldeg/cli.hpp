#pragma once

#include <chrono>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mldeg/degrees.hpp"
#include "mldeg/involution.hpp"
#include "mldeg/model_io.hpp"
#include "mldeg/parser.hpp"

#ifndef MLDEG_VERSION
#define MLDEG_VERSION "1.0.0"
#endif

namespace mldeg {

enum ExitCode : int { exit_ok = 0, exit_mismatch = 1, exit_input = 2, exit_disagreement = 3 };

inline Json to_json(const BiPoly& f) {
    Json coefficients = Json::array();
    for (auto it = f.terms().rbegin(); it != f.terms().rend(); ++it)
        coefficients.push_back({{"p", it->first.first}, {"u", it->first.second}, {"c", to_string(it->second)}});
    return Json{{"text", f.to_string()}, {"coefficients", std::move(coefficients)}};
}

inline Json to_json(const UniPoly& f, const std::string& var) {
    Json coefficients = Json::array();
    for (std::size_t i = 0; i < f.coefficients().size(); ++i)
        if (f[i] != 0) coefficients.push_back({{"degree", i}, {"c", to_string(f[i])}});
    return Json{{"text", f.to_string(var)}, {"coefficients", std::move(coefficients)}};
}

inline Json to_json(const CountRecord& r) {
    Json runs = Json::array();
    for (const auto& d : r.runs)
        runs.push_back({{"seed", d.seed},
                        {"count", d.count},
                        {"paths", d.paths},
                        {"bezout", d.bezout},
                        {"nonsingular", d.nonsingular},
                        {"junk", d.junk},
                        {"singular", d.singular},
                        {"diverged", d.diverged},
                        {"failed", d.failed},
                        {"duplicates", d.duplicates},
                        {"retracked", d.retracked}});
    return Json{{"quantity", to_string(r.quantity)},
                {"index", r.index},
                {"value", r.value},
                {"agreed", r.agreed},
                {"runs", std::move(runs)}};
}

inline Json to_json(const InvolutionReport& r) {
    return Json{{"passed", r.passed()},
                {"s_from_b", r.s_transform_ok ? to_json(r.s_from_b) : Json(nullptr)},
                {"b_from_s", r.b_transform_ok ? to_json(r.b_from_s) : Json(nullptr)},
                {"s_matches", r.s_matches},
                {"b_matches", r.b_matches},
                {"b0_equals_s0", r.leading_agree},
                {"u_degrees_within_d", r.degrees_ok},
                {"message", r.message}};
}

/// sum_i c_i [P^i], highest dimension first.
inline std::string chern_mather_text(const std::vector<long long>& c) {
    std::string out;
    for (std::size_t k = c.size(); k-- > 0;) {
        if (c[k] == 0) continue;
        const long long mag = c[k] < 0 ? -c[k] : c[k];
        if (out.empty())
            out += c[k] < 0 ? "-" : "";
        else
            out += c[k] < 0 ? " - " : " + ";
        if (mag != 1) out += std::to_string(mag);
        out += "[P^" + std::to_string(k) + "]";
    }
    return out.empty() ? "0" : out;
}

struct CliOptions {
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::size_t agreement = 3;
    bool json = false;
    bool pretty = false;
};

namespace detail {

inline Json model_echo(const ModelFile& f) {
    return Json{{"variables", f.variables}, {"generators", f.generators}, {"dim", f.dim}};
}

/// Reproducibility header. The thread count is left out: reports do not depend on it.
inline Json report_header(const std::string& command, const std::string& path, const ModelFile& f,
                          const CliOptions& opts) {
    return Json{{"tool", "mldeg"},
                {"version", MLDEG_VERSION},
                {"command", {{"name", command}, {"model_file", path}}},
                {"seed", f.seed},
                {"agreement", opts.agreement},
                {"tolerances", tolerances_to_json(f.tolerances)},
                {"model", model_echo(f)}};
}

inline Json values_json(const std::vector<CountRecord>& recs) {
    Json v = Json::array();
    for (const auto& r : recs) v.push_back(r.value);
    return v;
}

inline bool all_agreed(const std::vector<CountRecord>& recs) {
    for (const auto& r : recs)
        if (!r.agreed) return false;
    return true;
}

inline void render_text(const Json& value, std::ostream& out, const std::string& indent) {
    for (const auto& [key, v] : value.items()) {
        out << indent << key << ": ";
        if (v.is_object() && v.contains("text")) {
            out << v["text"].get<std::string>() << '\n';
        } else if (v.is_object()) {
            out << '\n';
            render_text(v, out, indent + "  ");
        } else if (v.is_string()) {
            out << v.get<std::string>() << '\n';
        } else {
            out << v.dump() << '\n';
        }
    }
}

/// Human-readable summary: header line, result block, status.
inline void render_summary(const Json& report, std::ostream& out) {
    out << "mldeg " << report["version"].get<std::string>() << "  " << report["command"]["name"].get<std::string>();
    if (report.contains("seed")) out << "  seed " << report["seed"] << "  agreement " << report["agreement"];
    out << '\n';
    if (report.contains("result")) render_text(report["result"], out, "  ");
    out << "status: " << report["status"].get<std::string>() << '\n';
}

inline void emit(const Json& report, const CliOptions& opts, std::ostream& out) {
    if (opts.pretty)
        out << report.dump(2) << '\n';
    else if (opts.json)
        out << report.dump() << '\n';
    else
        render_summary(report, out);
}

struct ModelCommand {
    std::string name;
    std::string path;
};

/// Runs one model-based subcommand and fills `report`; returns the exit code.
inline int run_model_command(const ModelCommand& cmd, const CliOptions& opts, Json& report) {
    ModelFile file = load_model_file(cmd.path);
    if (opts.seed) file.seed = *opts.seed;
    const ModelSpec model = file.to_model();
    if (opts.agreement == 0) throw ConfigError("--agreement must be at least 1");
    if (opts.threads == 0) throw ConfigError("--threads must be at least 1");
    const ComputeOptions copts{opts.agreement, opts.threads};
    const auto n = static_cast<std::uint32_t>(model.n());
    const auto d = static_cast<std::uint32_t>(model.dim);

    report = report_header(cmd.name, cmd.path, file, opts);
    Json result = Json::object();
    std::vector<CountRecord> records;
    int code = exit_ok;
    std::string status = "ok";

    if (cmd.name == "mldeg") {
        records.push_back(count_with_agreement(model, Quantity::ml_bidegree, 0, copts));
        result["ml_degree"] = records.front().value;
    } else if (cmd.name == "degree") {
        records.push_back(count_with_agreement(model, Quantity::degree, 0, copts));
        result["degree"] = records.front().value;
    } else if (cmd.name == "bidegrees") {
        records = count_series(model, Quantity::ml_bidegree, copts);
        result["b"] = values_json(records);
        if (all_agreed(records)) result["B"] = to_json(assemble_B(values_of(records), n, d));
    } else if (cmd.name == "sectional") {
        records = count_series(model, Quantity::sectional, copts);
        result["s"] = values_json(records);
        if (all_agreed(records)) result["S"] = to_json(assemble_S(values_of(records), n, d));
    } else if (cmd.name == "master" || cmd.name == "chern-mather") {
        records = count_series(model, Quantity::master, copts);
        result["v"] = values_json(records);
        if (cmd.name == "chern-mather" && all_agreed(records)) {
            const auto c = chern_mather_from_master(values_of(records));
            result["c_Ma"] = c;
            result["c_Ma_class"] = chern_mather_text(c);
        }
    } else if (cmd.name == "check") {
        const auto b = count_series(model, Quantity::ml_bidegree, copts);
        const auto s = count_series(model, Quantity::sectional, copts);
        const auto deg = count_with_agreement(model, Quantity::degree, 0, copts);
        records = b;
        records.insert(records.end(), s.begin(), s.end());
        records.push_back(deg);
        result["b"] = values_json(b);
        result["s"] = values_json(s);
        result["degree"] = deg.value;
        if (all_agreed(records)) {
            const BiPoly B = assemble_B(values_of(b), n, d);
            const BiPoly S = assemble_S(values_of(s), n, d);
            result["B"] = to_json(B);
            result["S"] = to_json(S);
            const InvolutionReport inv = cross_check(B, S, n, d);
            result["involution"] = to_json(inv);
            const bool positive_degree = deg.value > 0;
            const bool top_is_degree = s.back().value == deg.value;
            result["degree_positive"] = positive_degree;
            result["s_d_equals_degree"] = top_is_degree;
            const bool pass = inv.passed() && positive_degree && top_is_degree;
            result["verdict"] = pass ? "PASS" : "FAIL";
            if (!pass) {
                status = "mismatch";
                code = exit_mismatch;
            }
        }
    } else {
        throw InternalError("unknown command " + cmd.name);
    }

    if (!all_agreed(records)) {
        status = "seed_disagreement";
        code = exit_disagreement;
    }
    report["result"] = std::move(result);
    Json diag = Json::array();
    for (const auto& r : records) diag.push_back(to_json(r));
    report["diagnostics"] = std::move(diag);
    report["status"] = status;
    return code;
}

struct InvolutionArgs {
    std::string from_b, from_s, aluffi;
    std::uint32_t n = 0, d = 0;
    bool have_n = false, have_d = false;
};

inline int run_involution(const InvolutionArgs& a, Json& report) {
    const int given = !a.from_b.empty() + !a.from_s.empty() + !a.aluffi.empty();
    if (given != 1) throw DomainError("give exactly one of --from-b, --from-s, --aluffi");
    report = Json{{"tool", "mldeg"}, {"version", MLDEG_VERSION}};
    Json result;
    if (!a.aluffi.empty()) {
        report["command"] = {{"name", "involution"}, {"aluffi", a.aluffi}};
        const Poly p = parse_poly(a.aluffi, {"t"});
        std::vector<Rational> c;
        for (const auto& [e, coeff] : p.terms()) {
            if (c.size() <= e[0]) c.resize(e[0] + 1, Rational(0));
            c[e[0]] = coeff;
        }
        result["input"] = to_json(UniPoly(c), "t");
        result["transform"] = to_json(aluffi_involution(UniPoly(c)), "t");
    } else {
        if (!a.have_n || !a.have_d) throw DomainError("--from-b and --from-s need --n and --d");
        const bool forward = !a.from_b.empty();
        const std::string& text = forward ? a.from_b : a.from_s;
        report["command"] = {{"name", "involution"}, {forward ? "from_b" : "from_s", text}, {"n", a.n}, {"d", a.d}};
        const BiPoly in = BiPoly::from_poly(parse_poly(text, {"p", "u"}));
        result["input"] = to_json(in);
        result["transform"] = to_json(forward ? s_from_b(in, a.n, a.d) : b_from_s(in, a.n, a.d));
    }
    report["result"] = std::move(result);
    report["status"] = "ok";
    return exit_ok;
}

} // namespace detail

/// Entry point shared by the executable and the tests. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Maximum likelihood bidegrees, sectional ML degrees and Chern-Mather classes", "mldeg"};
    app.require_subcommand(1);
    app.set_version_flag("--version", MLDEG_VERSION);
    CliOptions opts;
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "override the model seed");
    app.add_option("--threads", opts.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--agreement", opts.agreement, "independent seeds that must agree")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_flag("--json", opts.json, "compact JSON report");
    app.add_flag("--pretty", opts.pretty, "indented JSON report");

    detail::ModelCommand model_cmd;
    const std::vector<std::pair<std::string, std::string>> model_commands = {
        {"mldeg", "ML degree b_0"},
        {"bidegrees", "ML bidegrees b_0..b_d and the B-polynomial"},
        {"sectional", "sectional ML degrees s_0..s_d and the S-polynomial"},
        {"master", "master-function bidegrees v_0..v_d"},
        {"chern-mather", "Chern-Mather class from the master-function bidegrees"},
        {"degree", "degree of the variety by linear slicing"},
        {"check", "compute B and S independently and cross-check them"}};
    for (const auto& [name, help] : model_commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        sub->add_option("model", model_cmd.path, "model file (JSON)")->required();
        sub->callback([&model_cmd, name = name] { model_cmd.name = name; });
    }
    detail::InvolutionArgs inv;
    auto* inv_cmd = app.add_subcommand("involution", "B <-> S transforms and the Aluffi involution");
    inv_cmd->fallthrough();
    inv_cmd->add_option("--from-b", inv.from_b, "B-polynomial in p, u");
    inv_cmd->add_option("--from-s", inv.from_s, "S-polynomial in p, u");
    inv_cmd->add_option("--aluffi", inv.aluffi, "univariate polynomial in t");
    auto* n_opt = inv_cmd->add_option("--n", inv.n, "ambient dimension");
    auto* d_opt = inv_cmd->add_option("--d", inv.d, "dimension");

    // A bare model path means the mldeg subcommand.
    std::vector<std::string> argv = args;
    if (!argv.empty() && !argv.front().empty() && argv.front().front() != '-' &&
        app.get_subcommand_no_throw(argv.front()) == nullptr)
        argv.insert(argv.begin(), "mldeg");
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return e.get_exit_code() == 0 ? exit_ok : exit_input;
    }
    if (seed_opt->count() > 0) opts.seed = seed;

    const auto started = std::chrono::steady_clock::now();
    Json report;
    int code = exit_ok;
    try {
        if (inv_cmd->parsed()) {
            inv.have_n = n_opt->count() > 0;
            inv.have_d = d_opt->count() > 0;
            code = detail::run_involution(inv, report);
        } else {
            code = detail::run_model_command(model_cmd, opts, report);
        }
    } catch (const ModelFileError& e) {
        err << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const Error& e) {
        err << "internal error: " << e.what() << '\n';
        return exit_mismatch;
    }
    detail::emit(report, opts, out);
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - started;
    err << "wall time " << std::fixed << std::setprecision(3) << wall.count() << " s\n";
    return code;
}

} // namespace mldeg
