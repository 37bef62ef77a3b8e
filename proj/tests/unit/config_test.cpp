#include <doctest.h>

#include <filesystem>
#include <string>

#include "qci/config.hpp"
#include "qci/error.hpp"

using namespace qci;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text, "t.cfg");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

const char* kBase = R"(schema: 1
id: t
target: pointwise_diag
system: {kind: torus, dim: 2}
c_bar: [0.6, 0.8]
lambda: [25, 50, 100, 200]
)";

}  // namespace

TEST_CASE("a minimal torus experiment parses with defaults") {
    const auto c = parse_config(kBase, "t.cfg");
    CHECK(c.id == "t");
    CHECK(c.target == "pointwise_diag");
    CHECK(c.system.kind == "torus");
    CHECK(c.c_bar[1] == doctest::Approx(0.8));
    CHECK(c.lambdas.size() == 4);
    CHECK(c.grid_size == 4096);
    CHECK(c.output_dir == "out");
}

TEST_CASE("c-bar with a zero component is rejected with its line") {
    std::string text = kBase;
    text.replace(text.find("[0.6, 0.8]"), 10, "[1, 0]");
    const auto msg = error_of(text);
    CHECK(msg.find("c̄ components must be nonzero") != std::string::npos);
    CHECK(msg.find("t.cfg:5") == 0);
}

TEST_CASE("unknown keys, bad grids and missing schema are rejected") {
    CHECK(error_of(std::string(kBase) + "colour: red\n").find("colour") != std::string::npos);
    std::string desc = kBase;
    desc.replace(desc.find("[25, 50, 100, 200]"), 18, "[25, 50, 40]");
    CHECK(error_of(desc).find("strictly increasing") != std::string::npos);
    std::string noschema = kBase;
    noschema.erase(0, noschema.find('\n') + 1);
    CHECK(error_of(noschema).find("schema") != std::string::npos);
    CHECK(error_of(std::string(kBase) + "spectrum: {grid: 5}\n").find("grid") != std::string::npos);
    CHECK(error_of("schema: 1\ntarget: nonsense\n").find("unknown target") != std::string::npos);
    CHECK(error_of("schema: 1\nid: [unclosed\n").find("t.cfg:") == 0);
}

TEST_CASE("points must lie inside the band") {
    const std::string text = R"(schema: 1
target: pointwise_diag
system: {kind: surface_of_revolution, profile: {name: sphere}}
band: [1.0, 2.1]
c_bar: [0.8, 0.6]
lambda: [25, 50, 100, 200]
points: [[0.5, 0.3]]
)";
    CHECK(error_of(text).find("band") != std::string::npos);
}

TEST_CASE("every shipped config parses") {
    int seen = 0;
    for (const auto& e : std::filesystem::directory_iterator(std::string(QCI_SOURCE_DIR) + "/configs")) {
        if (e.path().extension() != ".cfg") continue;
        CAPTURE(e.path().string());
        CHECK_NOTHROW(load_config(e.path().string()));
        ++seen;
    }
    CHECK(seen >= 10);
}

TEST_CASE("p1_ball windows hold exactly the eigenvalues with lambda_1 <= lambda") {
    auto c = parse_config(R"(schema: 1
target: integrated
system: {kind: surface_of_revolution, profile: {name: sphere}}
region: {kind: p1_ball}
lambda: [5, 10, 20, 40]
)");
    const auto sys = build_system(c.system);
    const auto r = build_region(c, sys, 5.0);
    CHECK(r.upper()[0] == 5.0);
    CHECK(r.upper()[1] == 5.5);
    CHECK(r.lower()[1] == -5.5);
}
