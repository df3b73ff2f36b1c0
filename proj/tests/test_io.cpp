#include "common.hpp"

#include "schrodlab/error.hpp"
#include "schrodlab/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto d = fs::temp_directory_path() / ("schrodlab_io_" + name + "_" + std::to_string(::getpid()));
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

} // namespace

TEST_SUITE("io") {

TEST_CASE("symbol round trip is bit exact") {
    auto d = scratch("roundtrip");
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    PolySymbol P(2, 6, {{{6, 0}, u(rng)}, {{4, 2}, u(rng) / 7}, {{2, 4}, M_PI}, {{0, 6}, 1.0 / 3.0}});
    for (const char* ext : {".json", ".toml"}) {
        auto path = (d / (std::string("p") + ext)).string();
        save_symbol(P, path, "random");
        auto back = load_symbol(path);
        REQUIRE(back.symbol.terms().size() == P.terms().size());
        for (size_t i = 0; i < P.terms().size(); ++i) {
            CHECK(back.symbol.terms()[i].alpha == P.terms()[i].alpha);
            CHECK(back.symbol.terms()[i].c == P.terms()[i].c);
        }
        CHECK(back.name == "random");
        CHECK_FALSE(back.negated);
    }
    fs::remove_all(d);
}

TEST_CASE("shipped symbols load") {
    auto a = load_symbol(std::string(SCHRODLAB_DATA_DIR) + "/symbols/circle4.json");
    CHECK(a.symbol.eval({1.0, 1.0}) == 4.0);
    auto b = load_symbol(std::string(SCHRODLAB_DATA_DIR) + "/symbols/quartic_axes.toml");
    CHECK(b.symbol.eval({1.0, 1.0}) == 2.0);
}

TEST_CASE("negative definite symbols are negated at load") {
    json j = {{"n", 2}, {"m", 4}, {"terms", {{{"alpha", {4, 0}}, {"c", -1}}, {{"alpha", {0, 4}}, {"c", -2}}}}};
    auto s = symbol_from_json(j);
    CHECK(s.negated);
    CHECK(s.symbol.eval({1.0, 1.0}) == 3.0);
}

TEST_CASE("malformed symbols") {
    CHECK_THROWS_AS(symbol_from_json(json{{"n", 2}, {"m", 4}}), ConfigError);
    CHECK_THROWS_AS(symbol_from_json(json{{"n", 2}, {"m", 4}, {"terms", json::array()}}), ConfigError);
    CHECK_THROWS_AS(symbol_from_json(json{{"n", 2}, {"m", 4}, {"terms", {{{"alpha", {-1, 5}}, {"c", 1}}}}}), ConfigError);
    CHECK_THROWS_AS(load_symbol("/nonexistent/p.json"), ConfigError);
}

TEST_CASE("TOML documents") {
    auto j = parse_toml("a = 1\nb = [1.5, \"inf\"]\nc = inf\n[t]\nx = true\n");
    CHECK(j["a"] == 1);
    CHECK(as_numbers(j["b"])[1] == INFINITY);
    CHECK(as_number(j["c"]) == INFINITY);
    CHECK(j["t"]["x"] == true);
    CHECK_THROWS_AS(parse_toml("a = = 1"), ConfigError);
    CHECK_THROWS_AS(as_number(json("abc")), ConfigError);
}

TEST_CASE("csv and number formatting") {
    CsvTable t;
    t.header = {"a", "b"};
    t.add({"1", "x,y"});
    t.add({"2", "say \"hi\""});
    CHECK(t.str() == "a,b\n1,\"x,y\"\n2,\"say \"\"hi\"\"\"\n");
    CHECK(fmt(0.1) == "0.1");
    CHECK(fmt(INFINITY) == "inf");
    CHECK(std::stod(fmt(M_PI)) == M_PI);
}

TEST_CASE("atomic writes replace the file") {
    auto d = scratch("atomic");
    auto p = (d / "f.txt").string();
    write_atomic(p, "one");
    write_atomic(p, "two");
    CHECK(slurp(p) == "two");
    size_t files = 0;
    for (auto& e : fs::directory_iterator(d)) files += e.is_regular_file();
    CHECK(files == 1);
    fs::remove_all(d);
}

}
