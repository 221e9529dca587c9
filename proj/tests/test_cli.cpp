#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pjd/cli.hpp"
#include "pjd/config.hpp"
#include "pjd/moments.hpp"
#include "pjd/timechange.hpp"

using namespace pjd;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "pjd_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("polynomial expression parser") {
    CHECK(cli::parse_poly("x", 1).same_terms(Poly::variable(1, 0)));
    CHECK(cli::parse_poly("x^2 - 1", 1)
              .same_terms(Poly::monomial(MultiIndex({2})) - Poly::constant(1, 1.0)));
    CHECK(cli::parse_poly("2*x1*x2", 2)
              .same_terms(Poly::variable(2, 0) * Poly::variable(2, 1) * 2.0));
    CHECK(cli::parse_poly("-0.5 * x2^3 + x1", 2)
              .same_terms(Poly::monomial(MultiIndex({0, 3}), -0.5) + Poly::variable(2, 0)));
    CHECK_THROWS_AS(cli::parse_poly("x3", 2), ConfigError);
    CHECK_THROWS_AS(cli::parse_poly("x^", 1), ConfigError);
}

TEST_CASE("zoo dump round-trips identically") {
    const fs::path dump = temp_file("ou.json");
    REQUIRE(cli::run({"zoo", "ou", "--out", dump.string()}) == 0);
    const config::json parsed = config::parse(slurp(dump));
    const ModelSpec reread = config::model_from_json(parsed);
    const config::json again = config::model_to_json(reread);
    CHECK(config::config_hash(parsed) == config::config_hash(again));

    // every zoo model round-trips
    for (const auto& name : zoo_names()) {
        const config::json doc = config::model_to_json(model_zoo(name));
        const config::json twice = config::model_to_json(config::model_from_json(doc));
        CHECK(config::config_hash(doc) == config::config_hash(twice));
    }
}

TEST_CASE("moments subcommand matches the library") {
    const fs::path out = temp_file("moments.csv");
    REQUIRE(cli::run({"moments", "--zoo", "garch", "--p", "x", "--tau", "0:2:0.5", "--out",
                      out.string()}) == 0);
    const std::string text = slurp(out);
    CHECK(text.find("tau,value") != std::string::npos);
    CHECK(text.find("# config_hash=") != std::string::npos);

    const ModelSpec m = model_zoo("garch");
    const GeneratorMatrix gm = build_generator_matrix(factor_spec(m), 4);
    const auto expected = moment_path(gm, Poly::variable(1, 0), m.factor.x0, {0.0, 0.5, 1.0, 1.5, 2.0});
    std::istringstream lines(text);
    std::string line;
    std::vector<double> got;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        got.push_back(std::stod(line.substr(line.find(',') + 1)));
    }
    REQUIRE(got.size() == expected.size());
    for (size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-14));
}

TEST_CASE("validate subcommand") {
    SUBCASE("zoo dumps pass") {
        for (const auto& name : {"ou", "garch", "example_5_1", "linear_vol_jumps"})
            CHECK(cli::run({"validate", "--zoo", name, "--out", temp_file("v.txt").string()}) == 0);
    }
    SUBCASE("degree violation is reported with exit 2") {
        // generator document with a quadratic drift
        config::json doc;
        doc["type"] = "generator";
        doc["dim"] = 1;
        doc["drift"] = config::json::array(
            {config::json::array({{{"exponents", {2}}, {"coeff", 1.0}}})});
        doc["mod_diffusion"] = config::json::array(
            {config::json::array({config::json::array({{{"exponents", {0}}, {"coeff", 1.0}}})})});
        const fs::path file = temp_file("bad.json");
        std::ofstream(file) << doc.dump();
        const fs::path out = temp_file("bad_report.txt");
        CHECK(cli::run({"validate", "--model", file.string(), "--out", out.string()}) == 2);
        CHECK(slurp(out).find("drift degree") != std::string::npos);
    }
    SUBCASE("unknown keys are rejected") {
        const fs::path file = temp_file("unknown.json");
        std::ofstream(file) << R"({"type":"generator","dim":1,"drift":[[]],)"
                               R"("mod_diffusion":[[[]]],"volatility":3})";
        CHECK(cli::run({"validate", "--model", file.string()}) == 2);
    }
}

TEST_CASE("override handling") {
    const fs::path out = temp_file("ou_override.json");
    REQUIRE(cli::run({"zoo", "ou", "--set", "rate=0.07", "--out", out.string()}) == 0);
    CHECK(config::parse(slurp(out))["rate"].get<double>() == 0.07);

    CHECK(cli::run({"zoo", "ou", "--set", "unknown_key=1"}) == 2);
    CHECK(cli::run({"zoo", "ou", "--set", "rate=true"}) == 2);  // type change
}

TEST_CASE("charfn subcommand") {
    const fs::path out = temp_file("charfn.csv");
    REQUIRE(cli::run({"charfn", "--zoo", "ou", "--u", "0.5:2:0.5", "--T", "1", "--x", "0", "--out",
                      out.string()}) == 0);
    const std::string text = slurp(out);
    CHECK(text.find("u,re,im,status") != std::string::npos);
    CHECK(text.find("complete") != std::string::npos);

    // absorption model blows up at u = i pi
    const fs::path out2 = temp_file("charfn2.csv");
    REQUIRE(cli::run({"charfn", "--zoo", "two_point_affine", "--u", "3.141592653589793", "--T", "4",
                      "--x", "1", "--out", out2.string()}) == 0);
    CHECK(slurp(out2).find("blowup@0.69") != std::string::npos);
}

TEST_CASE("timechange subcommand matches the library") {
    const fs::path out = temp_file("timechange.csv");
    REQUIRE(cli::run({"timechange", "--zoo", "ou_poisson_timechange", "--n", "2", "--out",
                      out.string()}) == 0);
    const ModelSpec m = model_zoo("ou_poisson_timechange");
    const GeneratorMatrix gm = build_generator_matrix(factor_spec(m), 2);
    const GeneratorMatrix tilted = subordinate_matrix(gm, *m.subordinator);
    std::istringstream lines(slurp(out));
    std::string line;
    std::vector<std::vector<double>> rows;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    REQUIRE(static_cast<int>(rows.size()) == tilted.size());
    for (int i = 0; i < tilted.size(); ++i)
        for (int j = 0; j < tilted.size(); ++j)
            CHECK(rows[i][j] == doctest::Approx(tilted.G(i, j)).epsilon(1e-15));
}

TEST_CASE("price subcommand") {
    const fs::path out = temp_file("price.json");
    REQUIRE(cli::run({"price", "--zoo", "example_5_1", "--payoff", "call", "--strike", "1", "--T",
                      "1", "--K", "8", "--out", out.string()}) == 0);
    const config::json report = config::parse(slurp(out));
    CHECK(report["price"].get<double>() > 0.05);
    CHECK(report["price"].get<double>() < 0.12);
    CHECK(report["ell"].size() == 9);
    CHECK(report["diagnostics"].contains("tail"));
    CHECK(report["provenance"]["version"] == cli::kVersion);
}

TEST_CASE("simulate determinism across thread counts") {
    const fs::path out1 = temp_file("sim1.json");
    const fs::path out2 = temp_file("sim2.json");
    const fs::path out8 = temp_file("sim8.json");
    const std::vector<std::string> base = {"simulate", "--zoo",   "garch", "--T",    "1",
                                           "--paths",  "2000",    "--steps", "50",   "--seed", "7"};
    auto with = [&](const fs::path& out, const char* threads) {
        std::vector<std::string> args = base;
        args.insert(args.end(), {"--threads", threads, "--out", out.string()});
        return args;
    };
    REQUIRE(cli::run(with(out1, "1")) == 0);
    REQUIRE(cli::run(with(out2, "2")) == 0);
    REQUIRE(cli::run(with(out8, "8")) == 0);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(slurp(out1) == slurp(out8));

    // raw sample CSV is byte-identical as well
    const fs::path raw1 = temp_file("raw1.csv");
    const fs::path raw8 = temp_file("raw8.csv");
    std::vector<std::string> rawargs = base;
    rawargs.insert(rawargs.end(), {"--raw", "--threads", "1", "--out", raw1.string()});
    REQUIRE(cli::run(rawargs) == 0);
    rawargs = base;
    rawargs.insert(rawargs.end(), {"--raw", "--threads", "8", "--out", raw8.string()});
    REQUIRE(cli::run(rawargs) == 0);
    CHECK(slurp(raw1) == slurp(raw8));
}

TEST_CASE("simulate with the model clock") {
    const fs::path out = temp_file("sim_sub.json");
    REQUIRE(cli::run({"simulate", "--zoo", "ou_poisson_timechange", "--subordinated", "--T", "1",
                      "--paths", "4000", "--steps", "100", "--seed", "3", "--out",
                      out.string()}) == 0);
    const config::json report = config::parse(slurp(out));
    CHECK(report["paths"].get<long long>() == 4000);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(cli::run({"moments", "--zoo", "garch"}) == 2);      // missing --tau
    CHECK(cli::run({"nonsense"}) == 2);                        // unknown subcommand
    CHECK(cli::run({"moments", "--tau", "0:1:0.5"}) == 2);     // no model source
}
