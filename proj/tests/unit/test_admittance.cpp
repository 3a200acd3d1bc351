#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "gauss_seidel.hpp"
#include "gridtwin/admittance.hpp"
#include "gridtwin/error.hpp"
#include "random_network.hpp"

using namespace gridtwin;

TEST_CASE("single 10 ohm reactance at 60 kV") {
    Network net;
    net.buses = {{1, "a", 60.0, BusKind::slack}, {2, "b", 60.0, BusKind::pq}};
    net.lines = {{1, 1, 2, 0.0, 10.0, 0.0, 1.0, 1.0}};
    net.ext_grid = {1, 1.0};
    const auto y = build_admittance(net);
    // -1 / (j 10/36) = +j 3.6
    CHECK(y.matrix()(0, 1).real() == doctest::Approx(0.0));
    CHECK(y.matrix()(0, 1).imag() == doctest::Approx(3.6).epsilon(1e-12));
    CHECK(y.matrix()(0, 0).imag() == doctest::Approx(-3.6).epsilon(1e-12));
}

TEST_CASE("transformer impedance on the system base") {
    const Transformer t{1, 1, 2, 25.0, 12.0, 0.5, 60.0, 10.0};
    const auto m = transformer_model(t, 100.0);
    const Complex z = 1.0 / m.y_series;
    CHECK(std::abs(z) == doctest::Approx(0.48).epsilon(1e-12));
    CHECK(z.real() == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("no branches and no shunts gives a zero matrix") {
    Network net;
    net.buses = {{1, "a", 60.0, BusKind::slack}};
    net.ext_grid = {1, 1.0};
    const auto y = build_admittance(net);
    CHECK(y.size() == 1);
    CHECK(std::abs(y.matrix()(0, 0)) == 0.0);
}

TEST_CASE("zero series impedance is rejected") {
    Network net;
    net.buses = {{1, "a", 60.0, BusKind::slack}, {2, "b", 60.0, BusKind::pq}};
    net.lines = {{1, 1, 2, 0.0, 0.0, 0.0, 1.0, 1.0}};
    net.ext_grid = {1, 1.0};
    CHECK_THROWS_AS(build_admittance(net), DataError);
}

TEST_CASE("matches the element-by-element assembly, symmetric, zero row sums without shunts") {
    const Network fixture = gridtwin::testing::mini_bornholm();
    for (const Network* net : {&fixture}) {
        const auto y = build_admittance(*net);
        const auto ref = gridtwin::testing::naive_ybus(*net);
        CHECK((y.matrix() - ref).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((y.matrix() - y.matrix().transpose()).cwiseAbs().maxCoeff() == 0.0);
        const Eigen::VectorXcd rows = y.matrix().rowwise().sum() - y.shunt_admittance();
        CHECK(rows.cwiseAbs().maxCoeff() < 1e-9);
    }
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto c = gridtwin::testing::random_case(seed);
        const auto y = build_admittance(c.network);
        CHECK((y.matrix() - gridtwin::testing::naive_ybus(c.network)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("islanded buses are left out of the matrix") {
    const auto out = apply_outage(gridtwin::testing::mini_bornholm(), BranchRef{BranchKind::line, 20});
    const auto y = build_admittance(out.network);
    CHECK(y.size() == 31);
    CHECK_FALSE(y.index_of(13).has_value());
    CHECK(y.index_of(0) == y.slack_index());
}
