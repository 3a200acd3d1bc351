#include <doctest.h>

#include <fstream>

#include "fixtures.hpp"
#include "gridtwin/config.hpp"
#include "gridtwin/error.hpp"

using namespace gridtwin;
using nlohmann::json;

TEST_CASE("defaults") {
    const RunConfig c = default_config();
    REQUIRE(c.scenarios.size() == 3);
    CHECK(c.scenarios[0].name == "base");
    CHECK(c.scenarios[0].cae);
    CHECK(c.scenarios[1].load_scale == 0.8);
    CHECK(c.scenarios[2].load_scale == 1.2);
    CHECK(c.redispatch.limits.v_max_pu == 1.05);
    CHECK(c.redispatch.limits.loading_max_percent == 90.0);
    CHECK(c.redispatch.weights.w_p == 10.0);
    CHECK(c.redispatch.weights.w_q == 1.0);
    CHECK(c.power_factors.load == 0.95);
    CHECK(c.power_factors.generation == 0.99);
}

TEST_CASE("relative paths resolve against the config file") {
    const RunConfig c = load_config(gridtwin::testing::fixture_dir() / "config.json");
    CHECK(c.network == gridtwin::testing::fixture_dir() / "network.json");
    CHECK(c.measurements == gridtwin::testing::fixture_dir() / "week.csv");
    CHECK(c.cae_stride == 4);
    CHECK_NOTHROW(validate_config(c, true));
}

TEST_CASE("values are read and round-trip") {
    const json doc = json::parse(R"({
      "network": "n.json", "measurements": "m.csv",
      "limits": {"v_max_pu": 1.04, "loading_max_percent": 80},
      "weights": {"w_p": 5},
      "gap_policy": "skip", "jobs": 2,
      "scenarios": [{"name": "hot", "load_scale": 1.3}]
    })");
    const RunConfig c = parse_config(doc, "/data");
    CHECK(c.network == std::filesystem::path("/data/n.json"));
    CHECK(c.redispatch.limits.v_max_pu == 1.04);
    CHECK(c.redispatch.limits.loading_max_percent == 80.0);
    CHECK(c.redispatch.weights.w_p == 5.0);
    CHECK(c.redispatch.weights.w_q == 1.0);
    CHECK(c.gap_policy == GapPolicy::skip);
    REQUIRE(c.scenarios.size() == 1);
    CHECK(c.scenarios[0].rsae);
    const RunConfig again = parse_config(to_json(c));
    CHECK(to_json(again) == to_json(c));
}

TEST_CASE("bad configs are rejected") {
    const auto rejects = [](const char* text) {
        CHECK_THROWS_AS(parse_config(json::parse(text)), ConfigError);
    };
    rejects(R"({"netwrok": "a.json"})");
    rejects(R"({"limits": {"v_min_pu": 1.1}})");
    rejects(R"({"limits": {"v_max": 1.1}})");
    rejects(R"({"weights": {"w_q": 0}})");
    rejects(R"({"jobs": 0})");
    rejects(R"({"jobs": "four"})");
    rejects(R"({"gap_policy": "interpolate"})");
    rejects(R"({"scenarios": [{"name": "a", "load_scale": -1}]})");
    rejects(R"({"scenarios": [{"name": "a"}, {"name": "a"}]})");
    rejects(R"({"scenarios": [{"name": "a/b"}]})");
    rejects(R"({"power_factors": {"load": 1.5}})");
}

TEST_CASE("missing inputs fail the input check") {
    RunConfig c = default_config();
    c.network = "/does/not/exist.json";
    c.measurements = "/does/not/exist.csv";
    CHECK_NOTHROW(validate_config(c, false));
    CHECK_THROWS_AS(validate_config(c, true), ConfigError);
    CHECK_THROWS_AS(load_config("/does/not/exist.json"), ConfigError);
}
