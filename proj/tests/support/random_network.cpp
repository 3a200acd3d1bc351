#include "random_network.hpp"

#include <random>

namespace gridtwin::testing {

RandomCase random_case(std::uint64_t seed, int max_buses) {
    std::mt19937_64 rng(seed);
    const auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    const auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

    RandomCase c;
    Network& net = c.network;
    const int n = pick(2, max_buses);
    const double vn = pick(0, 1) ? 60.0 : 20.0;
    for (int i = 0; i < n; ++i) net.buses.push_back({i + 1, "b" + std::to_string(i + 1), vn, i == 0 ? BusKind::slack : BusKind::pq});
    net.ext_grid = {1, uni(0.97, 1.05)};

    int line_id = 1;
    const auto add_line = [&](int a, int b) {
        net.lines.push_back({line_id++, a, b, uni(0.02, 0.3), uni(0.1, 0.45), uni(0.0, 12.0), uni(1.0, 15.0), 1.0});
    };
    for (int i = 2; i <= n; ++i) add_line(pick(1, i - 1), i);
    const int extra = pick(0, n / 2);
    for (int e = 0; e < extra; ++e) {
        const int a = pick(1, n);
        const int b = pick(1, n);
        if (a != b) add_line(a, b);
    }
    if (pick(0, 2) == 0) net.shunts.push_back({1, pick(1, n), uni(-2.0, 2.0), uni(0.0, 0.1)});

    // Keep the loading modest relative to the voltage level.
    const double scale = vn > 30 ? 4.0 : 0.8;
    c.point.timestamp = Timestamp{};
    for (int i = 2; i <= n; ++i) {
        net.loads.push_back({i, i, ""});
        const double p = uni(0.0, scale);
        c.point.loads.push_back({p, p * uni(0.0, 0.5)});
        if (pick(0, 1)) {
            net.generators.push_back({i, i, 1.0, ""});
            const double g = uni(0.0, scale);
            c.point.generators.push_back({g, g * uni(-0.2, 0.2)});
        }
    }
    validate_network(net);
    return c;
}

}  // namespace gridtwin::testing
