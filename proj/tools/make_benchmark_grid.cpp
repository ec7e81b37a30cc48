#include <iostream>

#include <CLI11.hpp>

#include "rocofscreen/benchmark_grid.hpp"
#include "rocofscreen/case_io.hpp"
#include "rocofscreen/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app("Write a synthetic meshed test case with inertia and UFLS data", "make-benchmark-grid");
    rocofscreen::BenchmarkGridOptions opts;
    std::string out;
    app.add_option("--buses", opts.buses, "Number of buses")->check(CLI::Range(16, 1000000));
    app.add_option("--seed", opts.seed, "Random seed")->required();
    app.add_option("--peak-load-mw", opts.peak_load_mw, "Peak load, MW (default 9 MW per bus)");
    app.add_option("--wind-share", opts.wind_share, "Installed wind as a share of peak load")
        ->check(CLI::Range(0.0, 2.0));
    app.add_option("--out", out, "Case JSON to write")->required();
    CLI11_PARSE(app, argc, argv);
    try {
        std::cout << "seed " << opts.seed << "\n";
        const auto grid = rocofscreen::make_benchmark_grid(opts);
        rocofscreen::write_case(grid, out);
        std::cout << grid.buses.size() << " buses, " << grid.generators.size() << " generators, "
                  << grid.loads.size() << " loads, " << grid.branches.size() << " branches -> " << out << "\n";
    } catch (const rocofscreen::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
