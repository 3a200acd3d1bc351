#include <doctest.h>

#include "fixtures.hpp"
#include "gridtwin/cae.hpp"

using namespace gridtwin;
using namespace gridtwin::testing;

TEST_CASE("fixture enumeration: lines by id, then transformers") {
    const auto cases = enumerate_contingencies(mini_bornholm());
    REQUIRE(cases.size() == 39);
    for (std::size_t i = 0; i < 23; ++i) CHECK(cases[i] == BranchRef{BranchKind::line, static_cast<ElementId>(i + 1)});
    for (std::size_t i = 23; i < 39; ++i) {
        CHECK(cases[i] == BranchRef{BranchKind::transformer, static_cast<ElementId>(i - 22)});
    }
}

TEST_CASE("two-bus network has one case") { CHECK(enumerate_contingencies(two_bus()).size() == 1); }

TEST_CASE("out-of-service branches are not enumerated") {
    Network net = mini_bornholm();
    net.set_branch_in_service({BranchKind::line, 5}, false);
    const auto cases = enumerate_contingencies(net);
    CHECK(cases.size() == 38);
    CHECK(std::find(cases.begin(), cases.end(), BranchRef{BranchKind::line, 5}) == cases.end());
}

TEST_CASE("case outcomes on the fixture") {
    const auto& week = fixture_week();
    const SecurityLimits limits;

    SUBCASE("ring segment at night is secure with nothing islanded") {
        const auto c = assess_contingency(week.network, week.point("2024-05-30T03:00Z"), {BranchKind::line, 2}, limits);
        CHECK(c.outcome == CaseOutcome::secure);
        CHECK(c.islanded_buses.empty());
        CHECK(c.min_voltage_pu > 0.95);
        CHECK(c.max_voltage_pu < 1.05);
    }
    SUBCASE("spur outage drops the islanded substation and assesses the rest") {
        const auto c = assess_contingency(week.network, week.point("2024-05-30T03:00Z"), {BranchKind::line, 20}, limits);
        CHECK((c.outcome == CaseOutcome::secure || c.outcome == CaseOutcome::violations));
        CHECK(c.islanded_buses == std::vector<ElementId>{13, 113});
        CHECK(c.worst_loading_percent > 0.0);
    }
    SUBCASE("cable to the external grid is degenerate") {
        const auto c = assess_contingency(week.network, week.point("2024-05-30T03:00Z"), {BranchKind::line, 1}, limits);
        CHECK(c.outcome == CaseOutcome::degenerate_topology);
        CHECK(c.islanded_buses.size() == 32);
        CHECK(c.diagnostic == "degenerate case: empty network");
    }
    SUBCASE("midday outage raises voltages past the limit") {
        const auto c =
            assess_contingency(week.network, week.point("2024-06-01T12:00Z"), {BranchKind::transformer, 12}, limits);
        REQUIRE(c.outcome == CaseOutcome::violations);
        CHECK(c.report.contingency == BranchRef{BranchKind::transformer, 12});
        for (const auto& v : c.report.violations) {
            CHECK(v.kind == ViolationKind::overvoltage);
            CHECK(v.value > 1.05);
        }
        CHECK(c.worst_voltage_pu == c.max_voltage_pu);
    }
}

TEST_CASE("sweep is order-deterministic and independent of the worker count") {
    const auto& week = fixture_week();
    const auto& point = week.point("2024-06-01T12:00Z");
    const auto first = run_contingency_sweep(week.network, point, {});
    const auto second = run_contingency_sweep(week.network, point, {});
    const auto threaded = run_contingency_sweep(week.network, point, {}, {}, 4);
    REQUIRE(first.size() == 39);
    REQUIRE(second.size() == 39);
    REQUIRE(threaded.size() == 39);
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(to_json(first[i]) == to_json(second[i]));
        CHECK(to_json(first[i]) == to_json(threaded[i]));
    }
}
