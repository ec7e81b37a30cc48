#pragma once

#include <cstdint>

#include "rocofscreen/case_model.hpp"

namespace rocofscreen {

/// Synthetic meshed test system: buses on a jittered square lattice with
/// random diagonals, a nuclear/coal/gas/wind fleet sized against the peak
/// load, inertia drawn by synthdyn and UFLS stages assigned. Generators and
/// loads are left at a peak-load dispatch that has not been power-flow solved.
struct BenchmarkGridOptions {
    int buses = 2000;
    std::uint64_t seed = 1;
    double peak_load_mw = 0.0;  // 0: 9 MW per bus
    double wind_share = 0.4;    // installed wind as a share of peak load
};

GridCase make_benchmark_grid(const BenchmarkGridOptions& options);

}  // namespace rocofscreen
