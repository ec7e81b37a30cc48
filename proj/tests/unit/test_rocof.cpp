#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "rocofscreen/errors.hpp"
#include "rocofscreen/rocof.hpp"
#include "support.hpp"

using namespace rocofscreen;

namespace {

struct Reference {
    int gen_id;
    double mw_lost;
    double system;
    std::array<double, 9> bus;
};

// Independent numpy oracle: same model, dense linear algebra.
const Reference kReference[] = {
    {1, 71.641021474500, -1.5188909147,
     {-0.6487739888, -0.6654848468, -0.6322217613, -0.6487739888, -0.6516783541, -0.6455879036, -0.6572869533,
      -0.6499399664, -0.6397748666}},
    {2, 163.0, -1.5690678646,
     {-1.2826036681, -1.6342308316, -1.9253759341, -1.4092019316, -1.4855122662, -1.5405967318, -1.6342308316,
      -1.6989110820, -1.7901866750}},
    {3, 85.0, -0.8425574095,
     {-0.7203048108, -1.3995461058, -1.0907882482, -0.8537737924, -0.9851746369, -0.9366142524, -1.2458657538,
      -1.1802949387, -1.0907882482}},
};

}  // namespace

TEST(SystemRocof, NineBusOutages) {
    const auto p = testing_support::prepare(testing_support::ninebus());
    for (const auto& ref : kReference) {
        const auto c = make_outage(p.grid, {ref.gen_id});
        EXPECT_NEAR(c.total_mw_lost, ref.mw_lost, 1e-8);
        EXPECT_NEAR(system_rocof(p.grid, c.total_mw_lost, c.outaged_generator_ids), ref.system, 1e-9);
    }
    const int none[] = {0};
    EXPECT_NEAR(system_rocof(p.grid, 85.0, std::span<const int>(none, 0)), -60.0 * 85.0 / (2.0 * 3779.0), 1e-15);
}

TEST(SystemRocof, NoRemainingInertia) {
    const auto grid = testing_support::ninebus();
    const int all[] = {1, 2, 3};
    EXPECT_THROW(system_rocof(grid, 100.0, all), DataError);
}

TEST(LocationalRocof, MatchesReference) {
    const auto p = testing_support::prepare(testing_support::ninebus());
    for (const auto& ref : kReference) {
        const auto r = locational_rocof(p.model, p.states, make_outage(p.grid, {ref.gen_id}));
        EXPECT_NEAR(r.system_rocof_hz_s, ref.system, 1e-9);
        ASSERT_EQ(r.bus_rocof_hz_s.size(), 9u);
        for (std::size_t i = 0; i < 9; ++i) {
            ASSERT_TRUE(r.bus_rocof_hz_s[i]);
            EXPECT_NEAR(*r.bus_rocof_hz_s[i], ref.bus[i], 1e-9) << "gen " << ref.gen_id << " bus " << i + 1;
        }
        EXPECT_FALSE(r.machine_accel[static_cast<std::size_t>(ref.gen_id - 1)]);
    }
}

TEST(LocationalRocof, MachineAccelerations) {
    const auto p = testing_support::prepare(testing_support::ninebus());
    const auto r = locational_rocof(p.model, p.states, make_outage(p.grid, {3}));
    EXPECT_NEAR(60.0 * *r.machine_accel[0], -0.5806194745, 1e-9);
    EXPECT_NEAR(60.0 * *r.machine_accel[1], -1.6678717547, 1e-9);
    // A bus hosting a machine follows that machine's acceleration.
    EXPECT_NEAR(*r.bus_rocof_hz_s[1], -1.3995461058, 1e-9);
}

TEST(LocationalRocof, ExactlyTwoSparseSolves) {
    const auto p = testing_support::prepare(testing_support::ninebus());
    for (int g : {1, 2, 3}) {
        const auto before = linalg::solve_count();
        const auto r = locational_rocof(p.model, p.states, make_outage(p.grid, {g}));
        EXPECT_EQ(r.sparse_solves, 2u);
        EXPECT_EQ(linalg::solve_count() - before, 2u);
    }
    const auto r = locational_rocof(p.model, p.states, make_outage(p.grid, {2, 3}));
    EXPECT_EQ(r.sparse_solves, 2u);
}

TEST(LocationalRocof, NullContingencyIsQuiet) {
    const auto p = testing_support::prepare(testing_support::ninebus());
    const auto r = locational_rocof(p.model, p.states, Contingency{"none", {}, 0.0});
    for (const auto& v : r.bus_rocof_hz_s) EXPECT_LE(std::abs(*v), 1e-9);
    for (const auto& a : r.machine_accel) EXPECT_LE(std::abs(*a), 1e-12);
    const auto pf_v = p.pf.voltages();
    for (std::size_t i = 0; i < 9; ++i) EXPECT_LE(std::abs(r.post_disturbance_voltages[i] - pf_v[i]), 1e-10);
}

TEST(LocationalRocof, ScalesInverselyWithInertia) {
    auto doubled = testing_support::ninebus();
    for (auto& g : doubled.generators) *g.h_sec *= 2.0;
    const auto p1 = testing_support::prepare(testing_support::ninebus());
    const auto p2 = testing_support::prepare(doubled);
    const auto r1 = locational_rocof(p1.model, p1.states, make_outage(p1.grid, {2}));
    const auto r2 = locational_rocof(p2.model, p2.states, make_outage(p2.grid, {2}));
    EXPECT_NEAR(r2.system_rocof_hz_s, r1.system_rocof_hz_s / 2.0, 1e-12);
    for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(*r2.bus_rocof_hz_s[i], *r1.bus_rocof_hz_s[i] / 2.0, 1e-10);
}

TEST(LocationalRocof, LosingEveryMachineIsAnError) {
    const auto p = testing_support::prepare(testing_support::ninebus());
    EXPECT_THROW(locational_rocof(p.model, p.states, make_outage(p.grid, {1, 2, 3})), DataError);
}

TEST(AngleSecondDerivative, PolarIdentity) {
    // theta'' = Im(v'' / v) when |v| is constant.
    const Complex v = std::polar(1.02, 0.3);
    const Complex vdd = v * Complex(-0.04, 0.7);
    EXPECT_NEAR(angle_second_derivative(v, vdd), 0.7, 1e-15);
    EXPECT_THROW(angle_second_derivative(Complex(0.0), vdd), NumericalError);
}

TEST(InjectionDerivative, GeneralForm) {
    const Complex at_rest = injection_second_derivative(2.0, 0.4, 0.0, -0.01);
    EXPECT_NEAR(std::abs(at_rest - std::polar(2.0, 0.4) * -0.01), 0.0, 1e-16);
    const Complex spinning = injection_second_derivative(2.0, 0.4, 0.1, 0.0);
    EXPECT_NEAR(std::abs(spinning - 0.01 * std::polar(2.0, 0.4 + std::numbers::pi / 2.0)), 0.0, 1e-16);
}

TEST(Outage, ParsingAndValidation) {
    EXPECT_EQ(parse_generator_list("gen3"), std::vector<int>{3});
    EXPECT_EQ(parse_generator_list("gen1, 2,gen12"), (std::vector<int>{1, 2, 12}));
    EXPECT_THROW(parse_generator_list("bus3"), DataError);
    EXPECT_THROW(parse_generator_list(""), DataError);
    auto grid = testing_support::ninebus();
    EXPECT_THROW(make_outage(grid, {9}), DataError);
    grid.generators[1].in_service = false;
    EXPECT_THROW(make_outage(grid, {2}), DataError);
    const auto c = make_outage(grid, {1, 3}, "pair");
    EXPECT_EQ(c.id, "pair");
    EXPECT_NEAR(c.total_mw_lost, 71.6 + 85.0, 1e-12);
}

TEST(LocationalRocof, InertiaWeightedMachineBusMeanNearSystem) {
    const auto p = testing_support::prepare(testing_support::ninebus());
    const auto c = make_outage(p.grid, {3});
    const auto r = locational_rocof(p.model, p.states, c);
    double weighted = 0.0;
    double weight = 0.0;
    for (std::size_t k = 0; k < p.model.machines.size(); ++k) {
        if (!r.machine_accel[k]) continue;
        const auto& m = p.model.machines[k];
        weighted += m.h_sec * m.s_base_mva * *r.bus_rocof_hz_s[m.bus];
        weight += m.h_sec * m.s_base_mva;
    }
    EXPECT_LE(std::abs(weighted / weight - r.system_rocof_hz_s), 0.05 * std::abs(r.system_rocof_hz_s));
}

TEST(SystemRocof, DesignContingencyAtTheInertiaFloor) {
    GridCase grid;
    Generator g;
    g.id = 1;
    g.h_sec = 5.0;
    g.s_base_mva = 20000.0;
    grid.generators.push_back(g);
    EXPECT_NEAR(system_rocof(grid, 2750.0), -0.825, 1e-12);
    EXPECT_EQ(system_rocof(grid, 0.0), 0.0);
}

TEST(AngleSecondDerivative, RotationAndFiniteDifference) {
    EXPECT_NEAR(angle_second_derivative(Complex(1.0, 0.0), Complex(0.0, 0.3)), 0.3, 1e-15);
    EXPECT_NEAR(angle_second_derivative(Complex(0.0, 1.0), Complex(-0.3, 0.0)), 0.3, 1e-15);
    const Complex v(0.93, -0.41);
    const Complex vdd(-0.27, 0.66);
    const double h = 1e-4;
    auto theta = [&](double t) { return std::arg(v + 0.5 * vdd * t * t); };
    const double fd = (theta(h) - 2.0 * theta(0.0) + theta(-h)) / (h * h);
    EXPECT_NEAR(angle_second_derivative(v, vdd), fd, 1e-6 * std::abs(fd));
}

TEST(InjectionDerivative, SimplifiedForm) {
    const Complex at_rest = injection_second_derivative(10.0, 0.0, 0.0, -0.01);
    EXPECT_NEAR(std::abs(at_rest - Complex(-0.1, 0.0)), 0.0, 1e-15);
    EXPECT_EQ(injection_second_derivative(10.0, 0.7, 0.0, 0.0), Complex(0.0));
}
