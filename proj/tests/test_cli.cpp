#include <gtest/gtest.h>

#include <sstream>

#include "mldeg/cli.hpp"
#include "mldeg/model_io.hpp"

using namespace mldeg;

namespace {

const std::string models = MLDEG_MODELS_DIR;

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

Json report(std::vector<std::string> args) {
    args.push_back("--json");
    const auto r = cli(args);
    EXPECT_LE(r.code, 1) << r.err;
    return Json::parse(r.out);
}

std::string error_of(const std::string& text) {
    try {
        parse_model_file(text);
    } catch (const ModelFileError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(ModelFile, ParsesRequiredAndOptionalFields) {
    const auto f = parse_model_file(R"({"variables": ["a", "b"], "generators": ["a*b - 1"], "dim": 1,
                                       "seed": 12, "tolerances": {"torus": 1e-9, "tracker": {"retrack_rounds": 4}}})");
    EXPECT_EQ(f.variables, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(f.generators.size(), 1u);
    EXPECT_EQ(f.dim, 1u);
    EXPECT_EQ(f.seed, 12u);
    EXPECT_EQ(f.tolerances.torus, 1e-9);
    EXPECT_EQ(f.tolerances.tracker.retrack_rounds, 4);
    EXPECT_EQ(f.tolerances.rank, Tolerances{}.rank);
    const auto m = f.to_model();
    EXPECT_EQ(m.generators.front(), parse_poly("a*b - 1", {"a", "b"}));
}

TEST(ModelFile, RoundTrips) {
    auto f = load_model_file(models + "/independence2x2x2.json");
    f.seed = 77;
    f.tolerances.tracker.max_step = 0.05;
    const auto text = to_json(f).dump(2);
    const auto g = parse_model_file(text);
    EXPECT_EQ(g.variables, f.variables);
    EXPECT_EQ(g.generators, f.generators);
    EXPECT_EQ(g.dim, f.dim);
    EXPECT_EQ(g.seed, 77u);
    EXPECT_EQ(to_json(g).dump(), to_json(f).dump());
}

TEST(ModelFile, RejectsUnknownAndMissingFields) {
    EXPECT_NE(error_of(R"({"variables": ["x"], "generators": [], "dim": 1, "extra": 0})").find("unknown field 'extra'"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"variables": ["x"], "generators": [], "dim": 1, "tolerances": {"tours": 1}})")
                  .find("unknown field 'tours'"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"variables": ["x"], "dim": 1})").find("missing field 'generators'"), std::string::npos);
    EXPECT_NE(error_of(R"({"variables": ["x", "x"], "generators": [], "dim": 1})").find("duplicate"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"variables": ["x"], "generators": [], "dim": -1})").find("dim"), std::string::npos);
    EXPECT_NE(error_of(R"({"variables": ["x"], "generators": [], "dim": 1, "tolerances": {"rank": 0}})")
                  .find("positive"),
              std::string::npos);
}

TEST(ModelFile, ErrorsCarryPositions) {
    EXPECT_NE(error_of(R"({"variables": ["x"] "generators": []})").find("byte 32"), std::string::npos);
    const auto e = error_of(R"({"variables": ["x", "y"], "generators": ["x + 1", "x * z"], "dim": 0})");
    EXPECT_NE(e.find("generators[1]"), std::string::npos);
    EXPECT_NE(e.find("unknown identifier 'z' at position 4"), std::string::npos);
    EXPECT_THROW(load_model_file(models + "/no_such_model.json"), ModelFileError);
}

TEST(Cli, InvolutionExamples) {
    auto r = report({"involution", "--from-b", "p^3+2*p^2*u+2*p*u^2", "--n", "3", "--d", "2"});
    EXPECT_EQ(r["result"]["transform"]["text"], "p^3 + 4*p^2*u + 2*p*u^2");
    r = report({"involution", "--from-s", "p^3 + 4*p^2*u + 2*p*u^2", "--n", "3", "--d", "2"});
    EXPECT_EQ(r["result"]["transform"]["text"], "p^3 + 2*p^2*u + 2*p*u^2");
    EXPECT_EQ(report({"involution", "--aluffi", "3*t^2+2*t+1"})["result"]["transform"]["text"], "3*t^2 + t + 1");
    EXPECT_EQ(report({"involution", "--aluffi", "7"})["result"]["transform"]["text"], "7");
}

TEST(Cli, InvolutionInputErrors) {
    EXPECT_EQ(cli({"involution", "--from-b", "p^3 + u", "--n", "3", "--d", "2"}).code, exit_input);
    EXPECT_EQ(cli({"involution", "--from-b", "p^2*u^2", "--n", "4", "--d", "1"}).code, exit_input);
    EXPECT_EQ(cli({"involution", "--from-b", "p^3"}).code, exit_input);
    EXPECT_EQ(cli({"involution", "--aluffi", "3*x"}).code, exit_input);
    EXPECT_EQ(cli({"involution"}).code, exit_input);
}

TEST(Cli, CountsOnSmallModels) {
    const auto b = report({"bidegrees", models + "/independence2x2.json"});
    EXPECT_EQ(b["result"]["b"], Json::parse("[1,2,2]"));
    EXPECT_EQ(b["result"]["B"]["text"], "p^3 + 2*p^2*u + 2*p*u^2");
    EXPECT_EQ(report({models + "/independence2x2.json"})["result"]["ml_degree"], 1);
    const auto cm = report({"chern-mather", models + "/torus3.json"});
    EXPECT_EQ(cm["result"]["c_Ma"], Json::parse("[0,0,0,1]"));
    EXPECT_EQ(cm["result"]["c_Ma_class"], "[P^3]");
    EXPECT_EQ(report({"chern-mather", models + "/point3.json"})["result"]["c_Ma_class"], "[P^0]");
    EXPECT_EQ(report({"degree", models + "/independence2x2.json"})["result"]["degree"], 2);
}

TEST(Cli, ReportHeaderIsReproducible) {
    const auto r = report({"sectional", models + "/independence2x2.json", "--seed", "5", "--agreement", "2"});
    EXPECT_EQ(r["tool"], "mldeg");
    EXPECT_EQ(r["version"], MLDEG_VERSION);
    EXPECT_EQ(r["seed"], 5);
    EXPECT_EQ(r["agreement"], 2);
    EXPECT_TRUE(r["tolerances"].contains("tracker"));
    EXPECT_EQ(r["diagnostics"].size(), 3u);
    EXPECT_EQ(r["diagnostics"][0]["runs"][1]["seed"], 6);
    EXPECT_EQ(r["result"]["S"]["text"], "p^3 + 4*p^2*u + 2*p*u^2");
}

TEST(Cli, CheckPassesAndFails) {
    const auto good = cli({"check", models + "/independence2x2.json", "--json"});
    EXPECT_EQ(good.code, exit_ok);
    EXPECT_EQ(Json::parse(good.out)["result"]["verdict"], "PASS");
    EXPECT_NE(good.err.find("wall time"), std::string::npos);
    EXPECT_EQ(good.out.find("wall"), std::string::npos);

    const auto bad = cli({"check", models + "/wrong_dim.json", "--json"});
    EXPECT_EQ(bad.code, exit_mismatch);
    const auto j = Json::parse(bad.out);
    EXPECT_EQ(j["result"]["verdict"], "FAIL");
    EXPECT_EQ(j["result"]["degree_positive"], false);
}

TEST(Cli, InputErrorsExitTwo) {
    EXPECT_EQ(cli({"mldeg", models + "/missing.json"}).code, exit_input);
    EXPECT_EQ(cli({"bidegrees"}).code, exit_input);
    EXPECT_EQ(cli({"frobnicate", "x"}).code, exit_input);
    EXPECT_EQ(cli({"mldeg", models + "/line.json", "--agreement", "0"}).code, exit_input);
    EXPECT_EQ(cli({"--help"}).code, exit_ok);
}

TEST(Cli, PrettyAndSummaryOutput) {
    const auto pretty = cli({"master", models + "/line.json", "--pretty"});
    EXPECT_NE(pretty.out.find("\n  \"version\""), std::string::npos);
    const auto text = cli({"master", models + "/line.json"});
    EXPECT_NE(text.out.find("v: [1,1]"), std::string::npos);
    EXPECT_NE(text.out.find("status: ok"), std::string::npos);
}
