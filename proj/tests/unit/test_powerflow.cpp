#include <doctest.h>

#include <chrono>
#include <cmath>

#include "fixtures.hpp"
#include "gauss_seidel.hpp"
#include "gridtwin/error.hpp"
#include "gridtwin/powerflow.hpp"
#include "random_network.hpp"

using namespace gridtwin;
using namespace gridtwin::testing;

// Closed form for j0.1 p.u. and P = 0.5 p.u.: V2^2 = (1 + sqrt(1 - 4 (xP)^2)) / 2.
constexpr double kV2 = 0.998746073110;
constexpr double kTheta2 = -0.050083710581;
constexpr double kSFrom = 0.500627750598;

TEST_CASE("two-bus closed form") {
    const auto sol = solve_power_flow(two_bus(), two_bus_point(50.0, 0.0));
    REQUIRE(sol.buses.size() == 2);
    CHECK(std::abs(sol.buses[1].vm_pu - kV2) <= 1e-8);
    CHECK(std::abs(sol.buses[1].va_rad - kTheta2) <= 1e-8);
    CHECK(std::abs(sol.branches[0].s_from_mva / 100.0 - kSFrom) <= 1e-8);
    CHECK(sol.p_ext_mw == doctest::Approx(50.0).epsilon(1e-10));
}

TEST_CASE("beyond the two-bus loadability limit the solver reports divergence") {
    CHECK_THROWS_AS(solve_power_flow(two_bus(), two_bus_point(520.0, 0.0)), PowerFlowError);
}

TEST_CASE("flat no-load case is exact") {
    const Network net = mini_bornholm();
    Network bare = net;
    bare.shunts.clear();
    for (auto& l : bare.lines) l.c_nf_per_km = 0.0;
    const auto sol = solve_power_flow(bare, zero_point(bare));
    for (const auto& b : sol.buses) {
        CHECK(b.vm_pu == bare.ext_grid.vm_pu);
        CHECK(b.va_rad == 0.0);
    }
    CHECK(sol.iterations == 0);
    CHECK(sol.max_mismatch_pu < 1e-12);
    for (const auto& br : sol.branches) {
        CHECK(br.i_ka == 0.0);
        CHECK(br.loading_percent == 0.0);
    }
}

TEST_CASE("random networks agree with Gauss-Seidel") {
    const auto start = std::chrono::steady_clock::now();
    int compared = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const auto c = random_case(seed);
        const auto gs = gauss_seidel(c.network, c.point);
        REQUIRE_MESSAGE(gs.converged, "oracle did not converge for seed " << seed);
        const auto sol = solve_power_flow(c.network, c.point);
        for (std::size_t i = 0; i < sol.buses.size(); ++i) {
            const Complex v = std::polar(sol.buses[i].vm_pu, sol.buses[i].va_rad);
            worst = std::max(worst, std::abs(v - gs.v(static_cast<Eigen::Index>(i))));
        }
        ++compared;
    }
    CHECK(compared == 200);
    CHECK(worst <= 1e-6);
    MESSAGE("max deviation " << worst << " in "
                             << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << " s");
}

TEST_CASE("power balance on the fixture") {
    const Network net = mini_bornholm();
    OperatingPoint p = zero_point(net);
    for (std::size_t k = 0; k < p.loads.size(); ++k) p.loads[k] = {3.0 + 0.1 * static_cast<double>(k), 1.0};
    for (std::size_t k = 0; k < p.generators.size(); ++k) p.generators[k] = {2.0, 0.2};
    const auto y = build_admittance(net);
    const auto sol = solve_power_flow(net, y, p);
    // Mismatch at the converged state, slack row excluded.
    const auto mis = power_mismatch(y, sol.vm(), sol.va(), specified_injections(net, y, p));
    for (Eigen::Index i = 0; i < mis.size(); ++i) {
        if (i != y.slack_index()) CHECK(std::abs(mis(i)) < 1e-7);
    }
    double losses = 0.0;
    for (const auto& br : sol.branches) losses += br.p_from_mw + br.p_to_mw;
    double gen = sol.p_ext_mw;
    double load = 0.0;
    for (const auto& g : p.generators) gen += g.p_mw;
    for (const auto& l : p.loads) load += l.p_mw;
    CHECK(std::abs(gen - load - losses) < 10 * 1e-8 * net.s_base_mva);
    CHECK(losses > 0.0);
    CHECK(sol.mismatch_history.size() == static_cast<std::size_t>(sol.iterations) + 1);
}

TEST_CASE("loading at exactly the rating reads 100 percent") {
    const auto sol = solve_power_flow(two_bus(), two_bus_point(50.0, 0.0));
    const Network rated = two_bus(0.1, sol.branches[0].i_ka);
    const auto y = build_admittance(rated);
    const auto br = compute_branch_results(rated, y, sol.vm(), sol.va());
    CHECK(br[0].loading_percent == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("operating point must cover every element") {
    const Network net = mini_bornholm();
    OperatingPoint p = zero_point(net);
    p.loads.pop_back();
    CHECK_THROWS_AS(check_operating_point(net, p), DataError);
    p = zero_point(net);
    p.generators[0].p_mw = std::nan("");
    CHECK_THROWS_AS(check_operating_point(net, p), DataError);
}
