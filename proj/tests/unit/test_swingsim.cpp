#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rocofscreen/errors.hpp"
#include "rocofscreen/swingsim.hpp"
#include "support.hpp"

using namespace rocofscreen;

namespace {

constexpr double kDt = 1.0 / 240.0;

std::vector<RelayEvent> feed(FrequencyRelays& relays, const std::vector<double>& trace) {
    std::vector<RelayEvent> all;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double f[] = {trace[k]};
        auto ev = relays.observe(static_cast<double>(k) * kDt, f);
        all.insert(all.end(), ev.begin(), ev.end());
    }
    return all;
}

}  // namespace

TEST(Relays, UflsTripsStrictlyBelowThreshold) {
    const int buses[] = {4};
    FrequencyRelays relays({{1, 4, UflsStage::stage1, false}, {2, 4, UflsStage::stage2, false}}, buses, 60.0, kDt);
    const auto events = feed(relays, {59.5, 59.3, 59.2999, 59.0, 58.9, 58.8, 58.0});
    ASSERT_EQ(events.size(), 2u);
    EXPECT_EQ(events[0].load_id, 1);
    EXPECT_EQ(events[0].time, 2 * kDt);
    EXPECT_EQ(events[0].frequency_hz, 59.2999);
    EXPECT_EQ(events[1].load_id, 2);
    EXPECT_EQ(events[1].time, 5 * kDt);
    EXPECT_EQ(events[1].stage, UflsStage::stage2);
}

TEST(Relays, StageThresholds) {
    EXPECT_EQ(ufls_threshold_hz(UflsStage::stage1), 59.3);
    EXPECT_EQ(ufls_threshold_hz(UflsStage::stage2), 58.9);
    EXPECT_EQ(ufls_threshold_hz(UflsStage::stage3), 58.5);
    EXPECT_TRUE(std::isinf(ufls_threshold_hz(UflsStage::none)));
}

TEST(Relays, FfrNeedsMoreThanTwentyFiveCycles) {
    const int buses[] = {1};
    // 100 samples at 240 Hz are exactly 25 cycles: no trip.
    FrequencyRelays exact({{1, 1, UflsStage::none, true}}, buses, 60.0, kDt);
    EXPECT_TRUE(feed(exact, std::vector<double>(100, 59.6)).empty());
    FrequencyRelays longer({{1, 1, UflsStage::none, true}}, buses, 60.0, kDt);
    std::vector<double> trace(1, 60.0);
    trace.resize(1 + 150, 59.6);
    const auto events = feed(longer, trace);
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0].kind, RelayEvent::Kind::ffr);
    EXPECT_NEAR(events[0].time, 101 * kDt, 1e-15);
}

TEST(Relays, FfrTimerResetsOnRecovery) {
    const int buses[] = {1};
    FrequencyRelays relays({{1, 1, UflsStage::none, true}}, buses, 60.0, kDt);
    std::vector<double> trace(80, 59.6);
    trace.push_back(59.7);
    trace.resize(trace.size() + 80, 59.6);
    EXPECT_TRUE(feed(relays, trace).empty());
}

TEST(Relays, UnknownBusAndDisabledLogic) {
    const int buses[] = {1, 2};
    EXPECT_THROW(FrequencyRelays({{1, 9, UflsStage::stage1, false}}, buses, 60.0, kDt), DataError);
    FrequencyRelays off({{1, 1, UflsStage::stage1, true}}, buses, 60.0, kDt, false, false);
    const double f[] = {50.0, 50.0};
    for (int k = 0; k < 200; ++k) EXPECT_TRUE(off.observe(k * kDt, f).empty());
}

TEST(Washout, RampSettlesToSlope) {
    const double slope = 2.0 * std::numbers::pi * 0.5;  // 0.5 Hz offset
    std::vector<double> angle(2000);
    for (std::size_t k = 0; k < angle.size(); ++k) angle[k] = 0.3 + slope * static_cast<double>(k) * kDt;
    const auto f = bus_frequency(angle, kDt, 60.0, 0.04);
    EXPECT_EQ(f[0], 60.0);
    EXPECT_LT(f[1], 60.5);
    EXPECT_NEAR(f.back(), 60.5, 1e-12);
    // First-order lag on the chord rate.
    for (std::size_t k : {1u, 10u, 50u}) {
        EXPECT_NEAR(f[k] - 60.0, 0.5 * (1.0 - std::exp(-static_cast<double>(k) * kDt / 0.04)), 1e-12);
    }
    EXPECT_THROW(bus_frequency(std::span<const double>(angle.data(), 1), kDt, 60.0, 0.04), DataError);
}

TEST(Simulate, NoEventStaysFlat) {
    const auto p = testing_support::prepare(testing_support::ninebus());
    SimOptions opts;
    opts.t_end = 1.0;
    const auto sim = simulate(p.model, p.states, Contingency{"none", {}, 0.0}, opts);
    ASSERT_EQ(sim.time.size(), 241u);
    EXPECT_EQ(sim.event_step, 24u);
    for (const auto& tr : sim.machine_omega) {
        for (double w : tr) EXPECT_LE(std::abs(w), 1e-10);
    }
    for (const auto& tr : sim.bus_frequency_hz) {
        for (double f : tr) EXPECT_NEAR(f, 60.0, 1e-8);
    }
    EXPECT_TRUE(sim.events.empty());
}

TEST(Simulate, FiniteDifferenceMatchesLocational) {
    const auto p = testing_support::prepare(testing_support::ninebus());
    for (int g : {1, 2, 3}) {
        const auto c = make_outage(p.grid, {g});
        const auto loc = locational_rocof(p.model, p.states, c);
        SimOptions opts;
        opts.t_end = 0.3;
        const auto sim = simulate(p.model, p.states, c, opts);
        for (std::size_t i = 0; i < 9; ++i) {
            const double fd = finite_difference_rocof(sim, i, 0.02);
            const double ref = *loc.bus_rocof_hz_s[i];
            EXPECT_LE(std::abs(fd - ref), std::max(0.10 * std::abs(ref), 0.02)) << "gen " << g << " bus " << i + 1;
        }
    }
}

TEST(Simulate, CenterOfInertiaSlope) {
    const auto p = testing_support::prepare(testing_support::ninebus());
    const auto c = make_outage(p.grid, {3});
    SimOptions opts;
    opts.t_end = 0.5;
    const auto sim = simulate(p.model, p.states, c, opts);
    EXPECT_FALSE(sim.machine_online[2]);
    const double slope = coi_frequency_slope(sim, p.model, 0.1);
    const double formula = system_rocof(p.grid, c.total_mw_lost, c.outaged_generator_ids);
    EXPECT_LE(std::abs(slope - formula), 0.05 * std::abs(formula)) << slope << " vs " << formula;
    // Very short windows approach the instantaneous centre-of-inertia value.
    EXPECT_NEAR(coi_frequency_slope(sim, p.model, kDt), -0.8186186932, 0.01);
    EXPECT_LT(machine_frequency_nadir(sim), 60.0);
    EXPECT_THROW(coi_frequency_slope(sim, p.model, 5.0), DataError);
}

TEST(Simulate, UflsLoadTripSlowsDecline) {
    auto grid = testing_support::ninebus();
    grid.loads[0].ufls_stage = UflsStage::stage1;
    const auto p = testing_support::prepare(grid);
    const auto c = make_outage(p.grid, {3});
    SimOptions opts;
    opts.t_end = 3.0;
    const auto with_relays = simulate(p.model, p.states, c, opts);
    ASSERT_EQ(with_relays.events.size(), 1u);
    const auto& ev = with_relays.events[0];
    EXPECT_EQ(ev.load_id, 1);
    EXPECT_EQ(ev.bus_id, 5);
    EXPECT_LT(ev.frequency_hz, 59.3);
    EXPECT_GT(ev.time, 0.1);

    opts.relays_enabled = false;
    const auto without = simulate(p.model, p.states, c, opts);
    EXPECT_TRUE(without.events.empty());
    EXPECT_GT(machine_frequency_nadir(with_relays), machine_frequency_nadir(without));

    // Replaying the relay-free traces finds the same first trip.
    const auto loads = relay_loads(p.grid);
    const auto replay = check_ufls(without, loads);
    ASSERT_FALSE(replay.empty());
    EXPECT_EQ(replay[0].time, ev.time);
    EXPECT_TRUE(check_ffr(without, loads).empty());
}

TEST(Simulate, NadirConvergesWithStepSize) {
    const auto p = testing_support::prepare(testing_support::ninebus());
    const auto c = make_outage(p.grid, {3});
    SimOptions opts;
    opts.t_end = 2.0;
    opts.relays_enabled = false;
    const double coarse = machine_frequency_nadir(simulate(p.model, p.states, c, opts));
    opts.dt = kDt / 2.0;
    const double fine = machine_frequency_nadir(simulate(p.model, p.states, c, opts));
    EXPECT_LT(coarse, 60.0);
    EXPECT_LT(std::abs(coarse - fine), 1e-4) << coarse << " vs " << fine;
}

TEST(Simulate, BlowUpIsNumericalError) {
    const auto p = testing_support::prepare(testing_support::ninebus());
    SimOptions opts;
    opts.t_end = 20.0;
    opts.blowup_omega = 0.01;
    EXPECT_THROW(simulate(p.model, p.states, make_outage(p.grid, {2}), opts), NumericalError);
}

TEST(Simulate, RejectsBadInputs) {
    const auto p = testing_support::prepare(testing_support::ninebus());
    SimOptions opts;
    opts.dt = 0.0;
    EXPECT_THROW(simulate(p.model, p.states, Contingency{}, opts), DataError);
    EXPECT_THROW(simulate(p.model, p.states, Contingency{"x", {7}, 10.0}, {}), DataError);
}
