#include "schrodlab/error.hpp"
#include "schrodlab/experiment.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace schrodlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto d = fs::temp_directory_path() / ("schrodlab_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::string& kind, const fs::path& cfg, const fs::path& out, std::optional<std::uint64_t> seed = {}) {
    RunOptions o;
    o.config_path = cfg.string();
    o.out_dir = out.string();
    o.seed = seed;
    std::ostringstream a, b;
    int code = run_command(kind, o, a, b);
    return {code, a.str(), b.str()};
}

const std::string kSymbol = std::string(SCHRODLAB_DATA_DIR) + "/symbols/circle4.json";

} // namespace

TEST_SUITE("cli") {

TEST_CASE("exponents run writes every output") {
    auto d = scratch("exp");
    put(d / "c.toml", "m = 4\nn = 2\nk = 4\n[[expect]]\np = 1.0\nI_p = \"(6.0, inf]\"\n");
    auto r = run("exponents", d / "c.toml", d / "out");
    CHECK(r.code == kExitPass);
    for (const char* f : {"summary.json", "metadata.json", "plot.json", "exponents.csv"}) CHECK(fs::exists(d / "out" / f));
    auto s = json::parse(slurp(d / "out" / "summary.json"));
    CHECK(s["pass"] == true);
    CHECK(s["results"]["tables"][0]["I_p"]["bracket"] == "(6.0, inf]");
    fs::remove_all(d);
}

TEST_CASE("failed expectation exits 2") {
    auto d = scratch("fail");
    put(d / "c.json", R"({"m": 4, "n": 2, "k": 4, "expect": [{"p": 1.0, "I_p": "(3.0, inf]"}]})");
    CHECK(run("exponents", d / "c.json", d / "out").code == kExitFailed);
    fs::remove_all(d);
}

TEST_CASE("configuration errors exit 1 and write nothing") {
    auto d = scratch("bad");
    put(d / "unknown.json", R"({"m": 4, "n": 2, "k": 4, "colour": 1})");
    auto r = run("exponents", d / "unknown.json", d / "o1");
    CHECK(r.code == kExitRefused);
    CHECK(r.err.find("unknown key 'colour'") != std::string::npos);
    CHECK_FALSE(fs::exists(d / "o1"));

    put(d / "range.json", R"({"m": 4, "n": 2, "k": 4, "p": [2.5]})");
    CHECK(run("exponents", d / "range.json", d / "o2").code == kExitRefused);
    CHECK_FALSE(fs::exists(d / "o2"));

    put(d / "kind.json", R"({"kind": "resolvent", "m": 4, "n": 2, "k": 4})");
    CHECK(run("exponents", d / "kind.json", d / "o3").code == kExitRefused);

    put(d / "c.yaml", "m: 4\n");
    CHECK(run("exponents", d / "c.yaml", d / "o4").code == kExitRefused);

    // inadmissible pair is refused before any propagation
    put(d / "pair.json", R"({"symbol": ")" + kSymbol + R"(", "pairs": [[1, 2]], "grid": {"N": 64, "L": 16}})");
    r = run("dispersive", d / "pair.json", d / "o5");
    CHECK(r.code == kExitRefused);
    CHECK(r.err.find("not admissible") != std::string::npos);
    CHECK_FALSE(fs::exists(d / "o5"));
    fs::remove_all(d);
}

TEST_CASE("summaries are byte identical across runs") {
    auto d = scratch("det");
    put(d / "a.json", R"({"symbol": ")" + kSymbol + R"(", "density": 512})");
    REQUIRE(run("analyze", d / "a.json", d / "r1").code == kExitPass);
    REQUIRE(run("analyze", d / "a.json", d / "r2").code == kExitPass);
    CHECK(slurp(d / "r1" / "summary.json") == slurp(d / "r2" / "summary.json"));
    CHECK(slurp(d / "r1" / "surface.csv") == slurp(d / "r2" / "surface.csv"));

    put(d / "p.json", R"({"symbol": ")" + kSymbol + R"(", "grid": {"N": 64, "L": 32},
        "potential": {"kind": "gaussian_bump", "amplitude": 0.1, "width": 2}, "born": {"lambda": 4}})");
    REQUIRE(run("potential", d / "p.json", d / "q1", 7).code == kExitPass);
    REQUIRE(run("potential", d / "p.json", d / "q2", 7).code == kExitPass);
    CHECK(slurp(d / "q1" / "summary.json") == slurp(d / "q2" / "summary.json"));
    fs::remove_all(d);
}

TEST_CASE("seed override reaches the config") {
    auto d = scratch("seed");
    put(d / "c.toml", "m = 4\nn = 2\nk = 2\n");
    REQUIRE(run("exponents", d / "c.toml", d / "o", 99).code == kExitPass);
    CHECK(json::parse(slurp(d / "o" / "summary.json"))["config"]["seed"] == 99);
    fs::remove_all(d);
}

TEST_CASE("validation fills defaults") {
    json c = validate_config("resolvent", json{{"symbol", kSymbol}}, ".");
    CHECK(c["grid"]["N"] == 512);
    CHECK(c["probes"]["include_delta"] == true);
    CHECK(c["pair_tolerances"].size() == 2);
    CHECK_THROWS_AS(validate_config("dispersive", json{{"symbol", kSymbol}, {"grid", {{"N", 100}}}}, "."), ConfigError);
    CHECK_THROWS_AS(validate_config("nope", json::object(), "."), ConfigError);
}

}
