#include "rocofscreen/benchmark_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rocofscreen/errors.hpp"
#include "rocofscreen/synthdyn.hpp"

namespace rocofscreen {

GridCase make_benchmark_grid(const BenchmarkGridOptions& options) {
    const int n = options.buses;
    if (n < 16) throw DataError("benchmark grid needs at least 16 buses");
    SynthRng rng(options.seed);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };

    GridCase grid;
    grid.name = "benchmark-" + std::to_string(n);
    const double peak = options.peak_load_mw > 0.0 ? options.peak_load_mw : 9.0 * n;
    const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));

    for (int i = 0; i < n; ++i) {
        Bus b;
        b.id = i + 1;
        b.name = "B" + std::to_string(i + 1);
        b.nominal_kv = 345.0;
        const double row = i / side + uniform(-0.3, 0.3);
        const double col = i % side + uniform(-0.3, 0.3);
        b.latitude = 26.0 + 10.0 * row / side;
        b.longitude = -106.0 + 12.0 * col / side;
        grid.buses.push_back(std::move(b));
    }
    auto add_branch = [&](int a, int b) {
        Branch br;
        br.from_bus = a + 1;
        br.to_bus = b + 1;
        br.x_pu = uniform(0.002, 0.01);
        br.r_pu = br.x_pu / 8.0;
        br.b_pu = 0.01;
        grid.branches.push_back(br);
    };
    for (int i = 0; i < n; ++i) {
        const int c = i % side;
        if (c + 1 < side && i + 1 < n) add_branch(i, i + 1);
        if (i + side < n) add_branch(i, i + side);
        if (c + 1 < side && i + side + 1 < n && rng.uniform() < 0.15) add_branch(i, i + side + 1);
    }

    std::vector<double> weight(static_cast<std::size_t>(n), 0.0);
    double weight_sum = 0.0;
    for (auto& w : weight) {
        if (rng.uniform() < 0.7) w = uniform(0.3, 1.7);
        weight_sum += w;
    }
    for (int i = 0; i < n; ++i) {
        const double w = weight[static_cast<std::size_t>(i)];
        if (w == 0.0) continue;
        Load l;
        l.id = static_cast<int>(grid.loads.size()) + 1;
        l.bus_id = i + 1;
        l.p_mw = peak * w / weight_sum;
        l.q_mvar = 0.3 * l.p_mw;
        grid.loads.push_back(l);
    }

    // Fleet. Unit sizes shrink with the system so small grids keep several plants.
    const double scale = std::clamp(peak / 30000.0, 0.05, 1.0);
    std::vector<bool> hosts(static_cast<std::size_t>(n), false);
    auto free_bus = [&] {
        for (int attempt = 0; attempt < 64; ++attempt) {
            const auto b = static_cast<std::size_t>(rng.uniform() * n);
            if (!hosts[b]) {
                hosts[b] = true;
                return static_cast<int>(b) + 1;
            }
        }
        for (std::size_t b = 0; b < hosts.size(); ++b) {
            if (!hosts[b]) {
                hosts[b] = true;
                return static_cast<int>(b) + 1;
            }
        }
        throw DataError("benchmark grid ran out of buses for plants");
    };
    auto add_unit = [&](int bus, Fuel fuel, double mw) {
        Generator g;
        g.id = static_cast<int>(grid.generators.size()) + 1;
        g.bus_id = bus;
        g.fuel = fuel;
        g.p_max_mw = std::round(mw);
        g.s_base_mva = std::round(g.p_max_mw / 0.9);
        g.synchronous = fuel != Fuel::wind;
        if (g.synchronous) g.xdp_pu = uniform(0.2, 0.35);
        grid.generators.push_back(g);
    };
    struct FleetRow {
        Fuel fuel;
        double share;
        int min_units;
        int max_units;
        double unit_lo;
        double unit_hi;
    };
    const FleetRow fleet[] = {
        {Fuel::nuclear, 0.10, 2, 2, 1100.0, 1350.0},
        {Fuel::coal, 0.40, 2, 4, 350.0, 900.0},
        {Fuel::gas, 0.60, 1, 4, 80.0, 500.0},
        {Fuel::wind, options.wind_share, 1, 1, 100.0, 400.0},
    };
    int slack_bus = 0;
    double slack_mw = 0.0;
    for (const auto& row : fleet) {
        double built = 0.0;
        const double target = row.share * peak;
        while (built < target) {
            const int bus = free_bus();
            const int units = row.min_units + static_cast<int>(rng.uniform() * (row.max_units - row.min_units + 1));
            const double size = uniform(row.unit_lo, row.unit_hi) * scale;
            for (int u = 0; u < units; ++u) add_unit(bus, row.fuel, size * uniform(0.97, 1.03));
            built += units * size;
            if (row.fuel == Fuel::coal && units * size > slack_mw) {
                slack_mw = units * size;
                slack_bus = bus;
            }
        }
    }
    for (const auto& g : grid.generators) {
        if (!g.synchronous) continue;
        auto& b = grid.buses[static_cast<std::size_t>(g.bus_id - 1)];
        b.kind = g.bus_id == slack_bus ? BusKind::slack : BusKind::pv;
        b.v_mag = 1.02;
    }

    double nuclear = 0.0;
    double wind = 0.0;
    double other = 0.0;
    for (const auto& g : grid.generators) {
        if (g.fuel == Fuel::nuclear) {
            nuclear += g.p_max_mw;
        } else if (g.fuel == Fuel::wind) {
            wind += g.p_max_mw;
        } else {
            other += g.p_max_mw;
        }
    }
    const double factor = std::clamp((peak - nuclear - 0.3 * wind) / other, 0.0, 1.0);
    for (auto& g : grid.generators) {
        if (g.fuel == Fuel::nuclear) {
            g.p_mw = g.p_max_mw;
        } else if (g.fuel == Fuel::wind) {
            g.p_mw = 0.3 * g.p_max_mw;
        } else {
            g.p_mw = factor * g.p_max_mw;
        }
    }

    SynthConfig config;
    config.seed = options.seed;
    assign_plant_correlated(grid, default_inertia_table(), config, rng);
    assign_ufls(grid, config, rng);
    return grid;
}

}  // namespace rocofscreen
