#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace rocofscreen::cli {

struct Options {
    std::string case_path;
    std::string sidecar;
    std::string out;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    unsigned workers = 1;
    double tol = 1e-8;
    std::string outage;
    std::optional<double> loss_mw;
    std::string mode = "locational";
    bool pf_only = false;
    // simulate
    double t_end = 10.0;
    double dt = 1.0 / 240.0;
    double damping = 0.0;
    bool no_relays = false;
    // synth
    double ffr_fraction = 0.0;
    // scenarios
    int n_contingencies = 163;
    int n_loading = 125;
    std::vector<double> load_range{15000.0, 75000.0};
    std::vector<double> wind_range{10000.0, 30000.0};
    double min_mw = 800.0;
    double design_mw = 2750.0;
    double max_mw = 5500.0;
    std::string bank;
    std::string table;
    double bin_mw = 250.0;
};

/// Builds the command tree bound to `opts`.
std::unique_ptr<CLI::App> make_app(Options& opts);

/// Runs the tool. Exit codes: 0 success, 1 data or usage error, 2 numerical
/// failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rocofscreen::cli
