#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rocofscreen/case_model.hpp"
#include "rocofscreen/powerflow.hpp"
#include "rocofscreen/rocof.hpp"
#include "rocofscreen/swingsim.hpp"

namespace rocofscreen {

/// Concern threshold for the system-wide estimate, Hz/s.
inline constexpr double kConcernRocof = -0.5;

struct LoadingCase {
    std::string id;
    double target_load_mw = 0.0;
    double target_wind_mw = 0.0;
    // Filled by dispatch.
    std::vector<int> committed;       // synchronous generator ids online
    std::vector<double> gen_p_mw;     // aligned with GridCase::generators
    double online_inertia_gws = 0.0;
    double wind_fraction = 0.0;       // wind MW / total generation MW
};

struct Dispatch {
    GridCase grid;  // loads scaled, units committed, power flow applied
    PowerFlowSolution powerflow;
    LoadingCase summary;
};

/// Merit-order stand-in for unit commitment: wind scaled to the target in
/// proportion to p_max, every nuclear unit at p_max, then coal and gas (largest
/// first) committed until their capability covers the remaining demand with a
/// 10% margin, all committed units at one loading factor. Units at the slack
/// bus are always committed. Loads are scaled uniformly and the power flow is
/// re-solved. Throws DataError when wind plus nuclear exceed the load or the
/// fleet cannot cover it.
Dispatch dispatch_heuristic(const GridCase& base, double target_load_mw, double target_wind_mw,
                            const PowerFlowOptions& pf = {});

/// Capability totals used to lay out and check loading cases.
struct FleetCapacity {
    double load_mw = 0.0;      // base-case total load
    double wind_mw = 0.0;      // installed wind
    double nuclear_mw = 0.0;
    double dispatchable_mw = 0.0;  // synchronous non-nuclear
    double fixed_mw = 0.0;         // non-synchronous non-wind output
};
FleetCapacity fleet_capacity(const GridCase& grid);

/// n loading cases on a regular grid over load and wind. The wind axis has
/// the largest divisor of n not above sqrt(n) levels; at each load level it
/// is clipped to what is feasible (wind + nuclear <= load, wind <= installed).
/// Each case is dispatched to record inertia and wind share. Throws DataError
/// when a load level admits no feasible wind level.
std::vector<LoadingCase> generate_loading_cases(const GridCase& base, int n, std::pair<double, double> load_range_mw,
                                                std::pair<double, double> wind_range_mw);

struct ContingencyConfig {
    int count = 163;
    double min_mw = 800.0;      // every outage strictly exceeds this
    double design_mw = 2750.0;  // single-plant outages stay at or below this
    double max_mw = 5500.0;     // upper end of the multi-site size draw
    double multi_site_fraction = 0.10;
};

/// Samples distinct generator outages, sized by unit p_max. The first
/// count - floor(count * multi_site_fraction) take units from one plant (same
/// bus and fuel) with a log-uniform size target in [min_mw, design_mw]; the
/// rest combine units from several buses with a target in [design_mw, max_mw].
/// Ids are c001, c002, ... Throws DataError when the fleet cannot supply
/// enough distinct qualifying outages.
std::vector<Contingency> generate_contingencies(const GridCase& grid, const ContingencyConfig& config,
                                                std::uint64_t seed);

enum class BankMode { system_only, locational, simulate };
std::string_view to_string(BankMode mode);
std::optional<BankMode> parse_bank_mode(std::string_view text);

struct ScenarioRecord {
    std::string loading_id;
    std::string contingency_id;
    double mw_lost = 0.0;
    double inertia_gws = 0.0;  // online before the event
    double system_rocof = 0.0;
    std::optional<double> bus_rocof_min;
    std::optional<double> bus_rocof_mean;
    std::optional<double> bus_rocof_max;
    std::optional<int> worst_bus;
    bool concern = false;
    std::string status = "ok";  // ok, not_applicable, or "error: ..."
};

struct BankOptions {
    BankMode mode = BankMode::locational;
    unsigned workers = 1;
    PowerFlowOptions powerflow;
    SimOptions sim;
    double fd_window = 0.02;  // simulate mode: per-bus finite-difference window, s
};

/// Evaluates every (loading case, contingency) pair. Rows reach `sink` in
/// loading-case order, then contingency order, one loading case at a time,
/// whatever the worker count. Failures are recorded in the row's status.
void run_bank(const GridCase& base, const std::vector<LoadingCase>& loading_cases,
              const std::vector<Contingency>& contingencies, const BankOptions& options,
              const std::function<void(const ScenarioRecord&)>& sink);

std::vector<ScenarioRecord> run_bank(const GridCase& base, const std::vector<LoadingCase>& loading_cases,
                                     const std::vector<Contingency>& contingencies, const BankOptions& options);

// Bank and table files.
void write_loading_cases(const std::vector<LoadingCase>& cases, std::ostream& out);
std::vector<LoadingCase> read_loading_cases(const std::filesystem::path& path);
void write_contingencies(const std::vector<Contingency>& contingencies, std::ostream& out);
std::vector<Contingency> read_contingencies(const std::filesystem::path& path);

void write_scenario_header(std::ostream& out);
void write_scenario_row(const ScenarioRecord& row, std::ostream& out);
std::vector<ScenarioRecord> read_scenario_table(const std::filesystem::path& path);

/// Summary tables derived from a scenario table.
struct LossBin {
    double lo_mw = 0.0;
    double hi_mw = 0.0;
    std::size_t count = 0;
    double system_rocof_mean = 0.0;
    double system_rocof_min = 0.0;
    std::optional<double> bus_mean_mean;
    std::optional<double> bus_min_min;
    std::size_t concern_count = 0;
};

struct LoadingSummary {
    std::string loading_id;
    double inertia_gws = 0.0;
    std::optional<double> wind_fraction;
    std::size_t scenarios = 0;
    std::size_t concern_count = 0;
    std::optional<double> worst_bus_rocof;
    // Least-squares slopes through the origin against MW lost, Hz/s per MW.
    double system_slope = 0.0;
    std::optional<double> bus_mean_slope;
};

struct BankReport {
    std::vector<LossBin> loss_bins;
    std::vector<LoadingSummary> loading;
};

BankReport summarize_bank(const std::vector<ScenarioRecord>& rows, const std::vector<LoadingCase>& loading_cases = {},
                          double bin_mw = 250.0);
void write_loss_bins(const BankReport& report, std::ostream& out);
void write_loading_summary(const BankReport& report, std::ostream& out);

}  // namespace rocofscreen
