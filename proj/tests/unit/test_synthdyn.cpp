#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "rocofscreen/case_io.hpp"
#include "rocofscreen/synthdyn.hpp"
#include "support.hpp"

using namespace rocofscreen;

namespace {

GridCase equal_loads(int n) {
    GridCase grid;
    Bus b;
    b.id = 1;
    b.kind = BusKind::slack;
    grid.buses.push_back(b);
    for (int i = 0; i < n; ++i) grid.loads.push_back({i + 1, 1, 1.0, 0.0, UflsStage::none, false});
    return grid;
}

GridCase fleet(int per_fuel, std::uint64_t seed) {
    // Units at distinct buses so every unit gets its own draw.
    GridCase grid;
    SynthRng rng(seed);
    int id = 0;
    for (const auto& spec : default_inertia_table()) {
        for (int k = 0; k < per_fuel; ++k) {
            Generator g;
            g.id = ++id;
            g.bus_id = id;
            g.fuel = spec.fuel;
            g.p_max_mw = spec.p_max_mw * (0.01 + 0.98 * rng.uniform());
            g.s_base_mva = g.p_max_mw;
            grid.generators.push_back(g);
        }
    }
    return grid;
}

}  // namespace

TEST(InertiaTable, Rows) {
    const auto& nuclear = inertia_spec_for(Fuel::nuclear);
    EXPECT_EQ(nuclear.h_max, 5.2);
    EXPECT_EQ(nuclear.h_min, 3.8);
    EXPECT_EQ(nuclear.h_avg, 4.2);
    EXPECT_EQ(nuclear.p_max_mw, 10000.0);
    EXPECT_EQ(inertia_spec_for(Fuel::coal).h_avg, 3.2);
    EXPECT_EQ(inertia_spec_for(Fuel::gas).p_max_mw, 2000.0);
    EXPECT_EQ(inertia_spec_for(Fuel::other).fuel, Fuel::gas);
}

TEST(SampleH, LargeUnitsGetTheAverageExactly) {
    SynthRng rng(7);
    const auto& gas = inertia_spec_for(Fuel::gas);
    EXPECT_EQ(sample_h(gas, 5000.0, rng), 4.3);
    EXPECT_EQ(sample_h(gas, 2000.0, rng), 4.3);
    const auto [a, b] = tapered_bounds(gas, 2000.0);
    EXPECT_EQ(a, 4.3);
    EXPECT_EQ(b, 4.3);
}

TEST(SampleH, ConsumesOneUniformPerDraw) {
    SynthRng a(11);
    SynthRng b(11);
    const auto& coal = inertia_spec_for(Fuel::coal);
    sample_h(coal, 100.0, a);
    sample_h(coal, 9000.0, a);
    b.uniform();
    b.uniform();
    EXPECT_EQ(a.uniform(), b.uniform());
}

TEST(SampleH, TinyGasUnitsSpanTheFullRange) {
    SynthRng rng(3);
    const auto& gas = inertia_spec_for(Fuel::gas);
    double lo = 100.0;
    double hi = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const double h = sample_h(gas, 1e-6, rng);
        lo = std::min(lo, h);
        hi = std::max(hi, h);
    }
    EXPECT_GE(lo, 1.0);
    EXPECT_LE(hi, 10.0);
    EXPECT_LT(lo, 1.5);
    EXPECT_GT(hi, 8.5);
}

TEST(SampleH, TaperIsMonotone) {
    for (const auto& spec : default_inertia_table()) {
        double width = std::numeric_limits<double>::infinity();
        for (double mw = 1.0; mw <= 1.2 * spec.p_max_mw; mw += spec.p_max_mw / 50.0) {
            const auto [a, b] = tapered_bounds(spec, mw);
            EXPECT_LE(b - a, width + 1e-12);
            EXPECT_LE(a, spec.h_avg);
            EXPECT_GE(b, spec.h_avg);
            const double c = triangular_mode(spec, mw);
            EXPECT_GE(c, a);
            EXPECT_LE(c, b);
            width = b - a;
        }
    }
}

TEST(SampleH, MonteCarloMomentsMatchTriangular) {
    for (const auto& spec : default_inertia_table()) {
        SynthRng rng(2024);
        const double mw = 0.01 * spec.p_max_mw;
        const auto [a, b] = tapered_bounds(spec, mw);
        const double c = triangular_mode(spec, mw);
        double sum = 0.0;
        for (int k = 0; k < 10000; ++k) {
            const double h = sample_h(spec, mw, rng);
            ASSERT_GE(h, a);
            ASSERT_LE(h, b);
            sum += h;
        }
        const double mean = sum / 10000.0;
        const double sd = std::sqrt((a * a + b * b + c * c - a * b - a * c - b * c) / 18.0);
        EXPECT_NEAR(mean, (a + b + c) / 3.0, 4.0 * sd / 100.0) << to_string(spec.fuel);
        EXPECT_LE(std::abs(mean - spec.h_avg), 0.05 * spec.h_avg) << to_string(spec.fuel);
    }
}

TEST(PlantCorrelation, GroupsBySiteFuelAndRating) {
    GridCase grid;
    auto unit = [&](int id, int bus, Fuel fuel, double mw) {
        Generator g;
        g.id = id;
        g.bus_id = bus;
        g.fuel = fuel;
        g.p_max_mw = mw;
        grid.generators.push_back(g);
    };
    unit(1, 1, Fuel::coal, 500.0);
    unit(2, 1, Fuel::coal, 500.0);
    unit(3, 1, Fuel::gas, 500.0);
    unit(4, 1, Fuel::coal, 600.0);
    unit(5, 2, Fuel::coal, 500.0);
    unit(6, 1, Fuel::coal, 540.0);
    SynthConfig config;
    SynthRng rng(5);
    EXPECT_EQ(assign_plant_correlated(grid, default_inertia_table(), config, rng), 4u);
    EXPECT_EQ(grid.generators[0].h_sec, grid.generators[1].h_sec);
    EXPECT_EQ(grid.generators[0].h_sec, grid.generators[5].h_sec);
    EXPECT_NE(grid.generators[0].h_sec, grid.generators[2].h_sec);
    EXPECT_NE(grid.generators[0].h_sec, grid.generators[3].h_sec);
    EXPECT_NE(grid.generators[0].h_sec, grid.generators[4].h_sec);
}

TEST(PlantCorrelation, SkipsNonSynchronous) {
    auto grid = testing_support::ninebus();
    grid.generators[2].synchronous = false;
    grid.generators[2].h_sec.reset();
    SynthRng rng(1);
    assign_plant_correlated(grid, default_inertia_table(), {}, rng);
    EXPECT_FALSE(grid.generators[2].h_sec);
    EXPECT_TRUE(grid.generators[0].h_sec);
}

TEST(Ufls, HundredEqualLoads) {
    auto grid = equal_loads(100);
    SynthRng rng(9);
    const auto report = assign_ufls(grid, {}, rng);
    int counts[4] = {0, 0, 0, 0};
    for (const auto& l : grid.loads) ++counts[static_cast<int>(l.ufls_stage)];
    EXPECT_NEAR(counts[1], 5, 1);
    EXPECT_NEAR(counts[2], 10, 1);
    EXPECT_NEAR(counts[3], 10, 1);
    EXPECT_TRUE(report.warnings.empty());
    EXPECT_NEAR(report.achieved_fraction[0], 0.05, 0.005);
}

TEST(Ufls, SingleLoadWarns) {
    auto grid = equal_loads(1);
    SynthRng rng(9);
    const auto report = assign_ufls(grid, {}, rng);
    EXPECT_FALSE(report.warnings.empty());
}

TEST(Ufls, FfrShareAndDisjointStages) {
    auto grid = equal_loads(200);
    SynthConfig config;
    config.ffr_fraction = 0.03;
    SynthRng rng(4);
    const auto report = assign_ufls(grid, config, rng);
    EXPECT_NEAR(report.ffr_fraction, 0.03, 1e-12);
    for (const auto& l : grid.loads) EXPECT_FALSE(l.ffr && l.ufls_stage != UflsStage::none);
}

TEST(Synthesis, SeedDeterminesTheCase) {
    auto a = testing_support::ninebus();
    auto b = a;
    auto c = a;
    SynthConfig config;
    config.seed = 42;
    synthesize_dynamics(a, config);
    synthesize_dynamics(b, config);
    config.seed = 43;
    synthesize_dynamics(c, config);
    EXPECT_EQ(case_to_json(a), case_to_json(b));
    EXPECT_NE(case_to_json(a), case_to_json(c));
}

TEST(Validation, FleetStatistics) {
    auto grid = fleet(1000, 1008);
    SynthConfig config;
    SynthRng rng(8);
    assign_plant_correlated(grid, default_inertia_table(), config, rng);
    const auto report = validate_synthesis(grid);
    ASSERT_EQ(report.fuels.size(), 3u);
    for (const auto& st : report.fuels) {
        const auto& spec = inertia_spec_for(st.fuel);
        EXPECT_EQ(st.count, 1000u);
        EXPECT_GE(st.min, spec.h_min);
        EXPECT_LE(st.max, spec.h_max);
        EXPECT_FALSE(st.mean_off_target) << to_string(st.fuel) << " mean " << st.mean;
    }
    // Smaller units vary more.
    for (const auto& spec : default_inertia_table()) {
        double previous = std::numeric_limits<double>::infinity();
        for (const auto& bin : report.size_bins) {
            if (bin.fuel != spec.fuel) continue;
            EXPECT_LE(bin.variance, previous) << to_string(spec.fuel) << " bin " << bin.lo;
            previous = bin.variance;
        }
    }
}

TEST(Validation, LargeUnitsAndEmptyFleet) {
    GridCase grid;
    for (int k = 0; k < 5; ++k) {
        Generator g;
        g.id = k + 1;
        g.bus_id = k + 1;
        g.fuel = Fuel::coal;
        g.p_max_mw = 3500.0;
        grid.generators.push_back(g);
    }
    SynthRng rng(1);
    assign_plant_correlated(grid, default_inertia_table(), {}, rng);
    const auto report = validate_synthesis(grid);
    ASSERT_EQ(report.fuels.size(), 1u);
    EXPECT_DOUBLE_EQ(report.fuels[0].mean, 3.2);
    ASSERT_EQ(report.size_bins.size(), 1u);
    EXPECT_EQ(report.size_bins[0].spread, 0.0);
    EXPECT_TRUE(validate_synthesis(GridCase{}).fuels.empty());
}
