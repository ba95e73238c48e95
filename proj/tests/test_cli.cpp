#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "catch_amalgamated.hpp"

#include "levysmooth/cli.hpp"

using namespace levysmooth;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

const char* kMomentsCfg = R"({
  "command": "moments",
  "subordinator": {"kind": "gamma", "a": 1, "b": 1},
  "t": [1], "p": [0.5], "seed": 7
})";

std::vector<std::string> violations_of(const std::string& text) {
    try {
        config::parse_config(text);
    } catch (const config::ConfigError& e) {
        return e.violations;
    }
    return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
    for (const auto& s : v)
        if (s.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("valid moments config parses") {
    const auto cfg = config::parse_config(kMomentsCfg);
    REQUIRE(cfg.command == config::Command::Moments);
    REQUIRE(cfg.seed() == 7);
    REQUIRE(cfg.threads() == 0);           // default materialized
    REQUIRE_FALSE(cfg.allow_divergent());  // default materialized
}

TEST_CASE("missing block is reported by name") {
    const auto v = violations_of(R"({"command":"moments","t":[1],"p":[0.5]})");
    REQUIRE_FALSE(v.empty());
    REQUIRE(any_contains(v, "config.subordinator"));
}

TEST_CASE("unknown command is rejected") {
    const auto v = violations_of(R"({"command":"warp"})");
    REQUIRE(any_contains(v, "command"));
    REQUIRE(any_contains(v, "warp"));
}

TEST_CASE("all violations are collected in one pass") {
    const auto v = violations_of(
        R"({"command":"moments","subordinator":{"kind":"gamma","a":-1},"typo":3})");
    REQUIRE(v.size() >= 4);  // bad a, missing b, missing t, missing p, unknown key
    REQUIRE(any_contains(v, "config.subordinator.a"));
    REQUIRE(any_contains(v, "config.subordinator.b"));
    REQUIRE(any_contains(v, "config.typo"));
}

TEST_CASE("unknown keys are rejected at every level") {
    REQUIRE(any_contains(
        violations_of(
            R"({"command":"moments","subordinator":{"kind":"gamma","a":1,"b":1,"rho":0.5},
                "t":[1],"p":[0.5]})"),
        "subordinator.rho"));
    REQUIRE(any_contains(
        violations_of(
            R"({"command":"density","noise":{"subordinator":{"kind":"gamma","a":1,"b":1},
                "spread":2},"t":[1],"y":{"lo":-1,"hi":1,"count":5}})"),
        "noise.spread"));
}

TEST_CASE("round trip is the identity on parsed configs") {
    const char* cfgs[] = {
        kMomentsCfg,
        R"({"command":"density","noise":{"subordinator":{"kind":"gamma","a":1,"b":1}},
            "t":[0.5,2],"y":{"lo":-2,"hi":2,"count":9}})",
        R"({"command":"spectral","psi":{"kind":"variance_gamma","a":1,"b":1}})",
        R"({"command":"sde-check","sde":{"drift":{"kind":"ou","rate":1},
            "noise":{"subordinator":{"kind":"stable","rho":0.75}}},
            "t":1,"x0":0.5,"n":1000,"h":0.01,"f":{"kind":"half_space"}})",
    };
    for (const char* c : cfgs) {
        const auto cfg = config::parse_config(c);
        const auto again = config::parse_config(config::serialize(cfg));
        REQUIRE(again == cfg);
        REQUIRE(config::config_hash(again) == config::config_hash(cfg));
    }
}

TEST_CASE("config hash tracks content") {
    auto a = config::parse_config(kMomentsCfg);
    auto b = config::parse_config(kMomentsCfg);
    REQUIRE(config::config_hash(a) == config::config_hash(b));
    b.doc["seed"] = 8;
    REQUIRE(config::config_hash(a) != config::config_hash(b));
}

TEST_CASE("moments run reproduces the closed form") {
    const auto cfg = config::parse_config(kMomentsCfg);
    const cli::RunResult res = cli::run(cfg);
    REQUIRE(cli::exit_code(res, cfg) == 0);
    REQUIRE(res.artifacts.size() == 1);
    REQUIRE(res.artifacts[0].name == "moments.csv");

    // quadrature row carries sqrt(pi)
    const std::string& csv = res.artifacts[0].body;
    const auto pos = csv.find("quadrature,");
    REQUIRE(pos != std::string::npos);
    const double v = std::strtod(csv.c_str() + pos + 11, nullptr);
    REQUIRE(v == Approx(1.7724538509055159).epsilon(1e-6));
}

TEST_CASE("smooth-check exit code follows the divergence contract") {
    const char* text = R"({
      "command": "smooth-check",
      "noise": {"subordinator": {"kind": "gamma", "a": 1, "b": 1}},
      "f": {"kind": "indicator_interval", "lo": -1, "hi": 1},
      "k": 1, "t": [0.3, 0.4, 0.6, 1.0],
      "x": [-2, -1, 0, 1, 2]
    })";
    auto cfg = config::parse_config(text);
    const cli::RunResult res = cli::run(cfg);
    REQUIRE(res.any_divergent);
    REQUIRE_FALSE(res.any_soft);
    REQUIRE(cli::exit_code(res, cfg) == 2);

    // rows 1-2 divergent, rows 3-4 clean
    const std::string& csv = res.artifacts[0].body;
    REQUIRE(res.artifacts[0].name == "smooth_check.csv");
    size_t nl = csv.find('\n');
    std::vector<std::string> lines;
    while (nl != std::string::npos) {
        const size_t next = csv.find('\n', nl + 1);
        if (next == std::string::npos) break;
        lines.push_back(csv.substr(nl + 1, next - nl - 1));
        nl = next;
    }
    REQUIRE(lines.size() == 4);
    REQUIRE(lines[0].find("divergent") != std::string::npos);
    REQUIRE(lines[1].find("divergent") != std::string::npos);
    REQUIRE(lines[2].find("ok") != std::string::npos);
    REQUIRE(lines[3].find("ok") != std::string::npos);

    cfg.doc["allow_divergent"] = true;
    REQUIRE(cli::exit_code(res, cfg) == 0);
}

TEST_CASE("spectral run lands on the published constants") {
    const auto cfg = config::parse_config(
        R"({"command":"spectral","psi":{"kind":"variance_gamma","a":1,"b":1}})");
    const cli::RunResult res = cli::run(cfg);
    REQUIRE(cli::exit_code(res, cfg) == 0);
    REQUIRE(res.artifacts.size() == 2);
    const std::string& sum = res.artifacts[1].body;
    REQUIRE(sum.find("FiniteLimit") != std::string::npos);
    REQUIRE(sum.find(",Finite,") != std::string::npos);
    // last column of the data row is t0 = d/(2a) = 0.5
    const auto comma = sum.rfind(',');
    REQUIRE(std::strtod(sum.c_str() + comma + 1, nullptr) == Approx(0.5).epsilon(1e-9));
}

TEST_CASE("reruns are byte identical") {
    const char* cfgs[] = {
        kMomentsCfg,
        R"({"command":"sde-check","task":"semigroup",
            "sde":{"drift":{"kind":"tanh","amplitude":0.5},
                   "noise":{"subordinator":{"kind":"gamma","a":1,"b":1}}},
            "t":0.5,"x0":0.0,"n":20000,"h":0.01,
            "f":{"kind":"indicator_interval","lo":-1,"hi":1},"seed":3})",
        R"({"command":"density-criterion",
            "sde":{"drift":{"kind":"zero"},
                   "noise":{"subordinator":{"kind":"drift","c":1}}},
            "t":1,"x0":0,"gamma":0.3,"m":6,"p":2,"n":20000,"bandwidth":0.05,"seed":5})",
    };
    for (const char* text : cfgs) {
        const auto cfg = config::parse_config(text);
        const cli::RunResult a = cli::run(cfg);
        const cli::RunResult b = cli::run(cfg);
        REQUIRE(a.artifacts.size() == b.artifacts.size());
        for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
            REQUIRE(a.artifacts[i].name == b.artifacts[i].name);
            REQUIRE(a.artifacts[i].body == b.artifacts[i].body);
        }
    }
}

TEST_CASE("seed changes the monte carlo artifact") {
    auto cfg = config::parse_config(
        R"({"command":"moments","subordinator":{"kind":"gamma","a":1,"b":1},
            "t":[1],"p":[0.5],"method":"mc","n":20000,"seed":7})");
    const cli::RunResult a = cli::run(cfg);
    cfg.doc["seed"] = 8;
    const cli::RunResult b = cli::run(cfg);
    REQUIRE(a.artifacts[0].body != b.artifacts[0].body);
}

TEST_CASE("write report produces the manifest") {
    const fs::path dir = fs::temp_directory_path() / "levysmooth_cli_test";
    fs::remove_all(dir);
    const auto cfg = config::parse_config(kMomentsCfg);
    const cli::RunResult res = cli::run(cfg);
    REQUIRE(cli::write_report(cfg, res, dir.string(), 0.125) == 0);

    REQUIRE(fs::exists(dir / "moments.csv"));
    REQUIRE(fs::exists(dir / "effective_config.json"));
    std::ifstream is(dir / "manifest.json");
    nlohmann::json m = nlohmann::json::parse(is);
    REQUIRE(m.at("command") == "moments");
    REQUIRE(m.at("seed") == 7);
    REQUIRE(m.at("config_hash") == config::config_hash(cfg));
    REQUIRE(m.contains("versions"));
    REQUIRE(m.contains("wall_time_s"));

    // round trip through the written effective config
    std::ifstream ec(dir / "effective_config.json");
    std::stringstream ss;
    ss << ec.rdbuf();
    REQUIRE(config::parse_config(ss.str()) == cfg);
    fs::remove_all(dir);
}

TEST_CASE("unwritable output path fails with exit 1") {
    const fs::path file = fs::temp_directory_path() / "levysmooth_blocker";
    std::ofstream(file) << "x";
    const auto cfg = config::parse_config(kMomentsCfg);
    const cli::RunResult res = cli::run(cfg);
    REQUIRE(cli::write_report(cfg, res, (file / "sub").string(), 0.0) == 1);
    fs::remove(file);
}

TEST_CASE("point normalization and command specific guards") {
    // scalar x entries promoted to arrays in dim 1
    const auto cfg = config::parse_config(
        R"({"command":"smooth-check","noise":{"subordinator":{"kind":"gamma","a":1,"b":1}},
            "f":{"kind":"indicator_interval","lo":-1,"hi":1},
            "t":[1],"x":[0.5,-0.5]})");
    REQUIRE(cfg.doc.at("x")[0].is_array());

    REQUIRE(any_contains(
        violations_of(
            R"({"command":"duhamel","sde":{"drift":{"kind":"zero"},
                "sigma":{"kind":"scalar","value":1},
                "noise":{"subordinator":{"kind":"gamma","a":2,"b":1}}},
                "f":{"kind":"indicator_interval","lo":-1,"hi":1},
                "t":1,"x":[0],"levels":[{"n":1000,"s_nodes":8,"h":0.05,"smoothing":0.1}]})"),
        "additive"));

    REQUIRE(any_contains(
        violations_of(
            R"({"command":"sde-check","task":"profile",
                "sde":{"drift":{"kind":"zero"},
                       "noise":{"subordinator":{"kind":"stable","rho":0.75}}},
                "t":1,"x0":0,"n":1000,"h":0.01,"f":{"kind":"half_space"},
                "offsets":[0.1,0.2]})"),
        "strictly decreasing"));
}
