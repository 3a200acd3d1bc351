// Writes the synthetic mini-Bornholm network and measurement series.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gridtwin/error.hpp"
#include "gridtwin/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Synthetic fixture generator"};
    app.require_subcommand(1);

    std::string out;
    std::string start = "2023-01-01T00:00Z";
    int days = 365;
    std::uint64_t seed = 7;

    auto* network = app.add_subcommand("network", "write the network document");
    network->add_option("--out", out, "output file (default stdout)");

    auto* measurements = app.add_subcommand("measurements", "write feeder measurements");
    measurements->add_option("--out", out, "output file (default stdout)");
    measurements->add_option("--start", start, "first timestamp");
    measurements->add_option("--days", days, "number of days")->check(CLI::Range(1, 3660));
    measurements->add_option("--seed", seed, "random seed");

    CLI11_PARSE(app, argc, argv);

    std::ofstream file;
    if (!out.empty()) {
        file.open(out);
        if (!file) {
            std::cerr << "cannot write " << out << '\n';
            return 3;
        }
    }
    std::ostream& sink = out.empty() ? std::cout : file;
    try {
        if (*network) {
            sink << gridtwin::synthetic::mini_bornholm_network().dump(2) << '\n';
        } else {
            gridtwin::synthetic::MeasurementOptions opt;
            opt.start = gridtwin::parse_timestamp(start);
            opt.days = days;
            opt.seed = seed;
            gridtwin::synthetic::write_measurements(sink, opt);
        }
    } catch (const gridtwin::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
