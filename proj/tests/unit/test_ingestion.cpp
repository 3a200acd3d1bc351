#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "gridtwin/error.hpp"
#include "gridtwin/ingestion.hpp"
#include "gridtwin/synthetic.hpp"

using namespace gridtwin;
using gridtwin::testing::at;

namespace {

std::vector<FeederMeasurement> parse(const std::string& text) {
    std::istringstream in(text);
    return parse_measurements(in);
}

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const DataError& e) {
        return e.what();
    }
    return {};
}

FeederMeasurement rec(const char* t, const char* sub, const char* feeder, double inj, double wdr) {
    return {at(t), sub, feeder, inj, wdr, 0};
}

}  // namespace

TEST_CASE("one row") {
    const auto r = parse("timestamp,substation_id,feeder_id,injected_kw,withdrawn_kw\n"
                         "2024-01-01T00:00:00Z,S03,F12,150.0,820.5\n");
    REQUIRE(r.size() == 1);
    CHECK(r[0].substation_id == "S03");
    CHECK(r[0].feeder_id == "F12");
    CHECK(r[0].injected_kw == 150.0);
    CHECK(r[0].withdrawn_kw == 820.5);
    CHECK(r[0].timestamp == at("2024-01-01T00:00Z"));
}

TEST_CASE("row errors carry line numbers") {
    const std::string header = std::string(kMeasurementHeader) + "\n";
    CHECK(error_of(header + "2024-01-01T00:00Z,S1,F1,1,-5\n") == "negative power channel, line 2");
    CHECK(error_of(header + "2024-01-01T00:00Z,S1,F1,1\n").find("line 2") != std::string::npos);
    CHECK(error_of(header + "2024-01-01T00:07Z,S1,F1,1,1\n").find("off-grid") != std::string::npos);
    CHECK(error_of(header + "2024-01-01T00:00Z,S1,F1,x,1\n").find("not a number") != std::string::npos);
    const auto dup = error_of(header + "2024-01-01T00:00Z,S1,F1,1,1\n2024-01-01T00:15Z,S1,F1,1,1\n"
                                       "2024-01-01T00:00Z,S1,F1,2,2\n");
    CHECK(dup.find("duplicate") != std::string::npos);
    CHECK(dup.find("lines 2 and 4") != std::string::npos);
}

TEST_CASE("records come back sorted") {
    const auto r = parse("2024-01-01T00:15Z,S2,F1,1,1\n2024-01-01T00:00Z,S2,F2,1,1\n2024-01-01T00:00Z,S1,F9,1,1\n");
    REQUIRE(r.size() == 3);
    CHECK(r[0].substation_id == "S1");
    CHECK(r[1].feeder_id == "F2");
    CHECK(r[2].timestamp == at("2024-01-01T00:15Z"));
}

TEST_CASE("reactive power reconstruction") {
    // tan(acos 0.95) and tan(acos 0.99)
    CHECK(reconstruct_reactive(1.0, PowerRole::load) == doctest::Approx(0.328684105).epsilon(1e-9));
    CHECK(reconstruct_reactive(1.0, PowerRole::generation) == doctest::Approx(0.142492283).epsilon(1e-9));
    CHECK(reconstruct_reactive(0.0, PowerRole::load) == 0.0);
    CHECK(reconstruct_reactive(0.0, PowerRole::generation) == 0.0);
    CHECK_THROWS_AS(reconstruct_reactive(-1.0, PowerRole::load), DataError);
    for (double p : {0.1, 2.5, 17.0}) {
        const double q = reconstruct_reactive(p, PowerRole::load);
        CHECK(std::abs(p / std::hypot(p, q) - 0.95) < 1e-12);
    }
}

TEST_CASE("feeders sum per substation") {
    const std::vector<FeederMeasurement> r = {rec("2024-01-01T00:00Z", "S1", "F1", 100, 500),
                                              rec("2024-01-01T00:00Z", "S1", "F2", 200, 300)};
    const auto a = aggregate_to_substation(r, GapPolicy::skip);
    const auto& s = a.series.at("S1").samples.at(0);
    CHECK(s.p_gen_mw == doctest::Approx(0.3));
    CHECK(s.p_load_mw == doctest::Approx(0.8));
    CHECK(s.q_load_mvar == doctest::Approx(0.8 * 0.328684105));
    CHECK(a.gaps.empty());
}

TEST_CASE("gap policies") {
    const std::vector<FeederMeasurement> r = {
        rec("2024-01-01T00:00Z", "S1", "F1", 100, 500), rec("2024-01-01T00:00Z", "S1", "F2", 200, 300),
        rec("2024-01-01T00:15Z", "S1", "F1", 110, 510),  // F2 missing
        rec("2024-01-01T00:30Z", "S2", "F1", 1, 1),      // all of S1 missing
    };
    SUBCASE("hold-last carries the previous value and logs the gap") {
        const auto a = aggregate_to_substation(r, GapPolicy::hold_last);
        const auto* s = a.series.at("S1").at(at("2024-01-01T00:15Z"));
        REQUIRE(s);
        CHECK(s->p_gen_mw == doctest::Approx(0.31));
        CHECK(s->p_load_mw == doctest::Approx(0.81));
        REQUIRE_FALSE(a.gaps.empty());
        CHECK(a.gaps.front().feeder_id == "F2");
        CHECK(a.gaps.front().filled);
    }
    SUBCASE("skip drops the substation sample") {
        const auto a = aggregate_to_substation(r, GapPolicy::skip);
        CHECK(a.series.at("S1").at(at("2024-01-01T00:15Z")) == nullptr);
        CHECK(a.series.at("S1").at(at("2024-01-01T00:30Z")) == nullptr);
        CHECK(a.series.at("S1").samples.size() == 1);
    }
    SUBCASE("zero fills with nothing") {
        const auto a = aggregate_to_substation(r, GapPolicy::zero);
        CHECK(a.series.at("S1").at(at("2024-01-01T00:15Z"))->p_gen_mw == doctest::Approx(0.11));
    }
    SUBCASE("a named substation without feeders is an error") {
        const std::vector<std::string> expected = {"S1", "S9"};
        CHECK_THROWS_AS(aggregate_to_substation(r, GapPolicy::skip, {}, expected), DataError);
    }
    CHECK(parse_gap_policy("hold-last") == GapPolicy::hold_last);
    CHECK_THROWS_AS(parse_gap_policy("interpolate"), ConfigError);
}

TEST_CASE("historical maximum") {
    const std::vector<double> a = {0.2, 0.9, 0.4};
    const std::vector<double> zeros = {0.0, 0.0};
    const std::vector<double> one = {1.5};
    CHECK(historical_max(a) == 0.9);
    CHECK(historical_max(zeros) == 0.0);
    CHECK(historical_max(one) == 1.5);
    CHECK_THROWS_AS(historical_max(std::span<const double>{}), DataError);
}

TEST_CASE("operating points from the synthetic week") {
    const Network net = gridtwin::testing::mini_bornholm();
    std::ostringstream csv;
    synthetic::write_measurements(csv, {at("2024-05-29T00:00Z"), 1, 7});
    std::istringstream in(csv.str());
    const auto records = parse_measurements(in);
    CHECK(records.size() == 96 * 32);
    const auto names = required_substations(net);
    const auto agg = aggregate_to_substation(records, GapPolicy::hold_last, {}, names);
    const auto set = build_operating_points(net, agg);
    CHECK(set.points.size() == 96);
    CHECK(set.dropped.empty());
    const auto& p = set.points.front();
    CHECK(p.loads.size() == net.loads.size());
    CHECK(p.generators.size() == net.generators.size());
    for (const auto& g : p.generators) CHECK(std::abs(g.q_mvar - 0.142492283 * g.p_mw) < 1e-9);
    const auto maxima = historical_max(net, agg);
    CHECK(maxima.size() == net.generators.size());
}

TEST_CASE("live replay rejects a repeated record") {
    MeasurementStream s;
    s.feed(rec("2024-01-01T00:00Z", "S1", "F1", 1, 1));
    CHECK_THROWS_AS(s.feed(rec("2024-01-01T00:00Z", "S1", "F1", 2, 2)), DataError);
    CHECK_FALSE(s.feed_line(kMeasurementHeader).has_value());
}
